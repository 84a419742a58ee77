#include "acpm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "acpm/connection.hpp"
#include "acpm/errors.hpp"
#include "acpm/expr.hpp"
#include "acpm/frenet.hpp"
#include "acpm/legendre.hpp"
#include "acpm/spherical.hpp"
#include "json.hpp"

namespace acpm::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kKnownKeys = {
    "seed",          "manifold.name", "manifold.epsilon", "manifold.probes",   "manifold.metric",
    "manifold.phi",  "manifold.xi",   "manifold.eta",     "manifold.domain",   "manifold.probe_lo",
    "manifold.probe_hi", "curve.builtin", "curve.components", "curve.csv",     "curve.psi",
    "curve.psi_s0",  "grid.from",     "grid.to",          "grid.n",            "tolerances.tol",
    "tolerances.normality", "spherical.theta", "spherical.alpha", "output.out",
};

template <std::size_t N>
std::array<std::string, N> fixed_strings(const config::Document& doc, const std::string& key) {
  const auto v = doc.strings(key);
  std::array<std::string, N> out;
  if (!v) return out;
  if (v->size() != N) throw ValidationError("config key '" + key + "' needs " + std::to_string(N) + " entries");
  std::copy(v->begin(), v->end(), out.begin());
  return out;
}

Vec3 fixed_vec(const config::Document& doc, const std::string& key, const Vec3& fallback) {
  const auto v = doc.numbers(key);
  if (!v) return fallback;
  if (v->size() != 3) throw ValidationError("config key '" + key + "' needs 3 numbers");
  return {(*v)[0], (*v)[1], (*v)[2]};
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

const char* flag_of(const std::exception& e) {
  if (dynamic_cast<const GeodesicError*>(&e)) return "geodesic";
  if (dynamic_cast<const DegenerateError*>(&e)) return "degenerate";
  if (dynamic_cast<const NotLegendreError*>(&e)) return "not_legendre";
  if (dynamic_cast<const HypothesisError*>(&e)) return "hypothesis";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  return "error";
}

/// A CSV cell holding either a number or a status flag.
struct Cell {
  double value = kNaN;
  std::string flag;

  static Cell of(double v) { return Cell{v, {}}; }
  static Cell flagged(const std::string& f) { return Cell{kNaN, f}; }
  bool ok() const { return flag.empty(); }
  std::string str() const { return ok() ? format_number(value) : flag; }
};

void write_row(std::ostringstream& out, const std::vector<Cell>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i].str();
  out << '\n';
}

double json_safe(double v) { return std::isfinite(v) ? v : kNaN; }

json point_json(const Point& p) { return json::array({p.x(), p.y(), p.z()}); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ScalarFn scalar_expression(const std::string& text) {
  const auto e = expr::parse(text);
  return [e](double s) { return e.eval(expr::Bindings::at_parameter(s)); };
}

std::pair<double, double> require_interval(const RunConfig& cfg, const char* what) {
  if (!cfg.from || !cfg.to) throw ValidationError(std::string(what) + " needs an interval: set --from and --to");
  return {*cfg.from, *cfg.to};
}

GeneratedLegendre make_generator(const RunConfig& cfg) {
  const auto [lo, hi] = require_interval(cfg, "the generator");
  return generate_legendre_q3(AngleFunction::parse(cfg.curve.psi, cfg.curve.psi_s0), lo, hi);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Command command_from_string(const std::string& name) {
  if (name == "verify-manifold") return Command::verify_manifold;
  if (name == "analyze-curve") return Command::analyze_curve;
  if (name == "gen-legendre") return Command::gen_legendre;
  if (name == "check-spherical") return Command::check_spherical;
  if (name == "plot") return Command::plot;
  throw ValidationError("unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::verify_manifold: return "verify-manifold";
    case Command::analyze_curve: return "analyze-curve";
    case Command::gen_legendre: return "gen-legendre";
    case Command::check_spherical: return "check-spherical";
    case Command::plot: return "plot";
  }
  return "?";
}

CurveSource CurveSource::from_flag(const std::string& text) {
  CurveSource c;
  if (text == "upsilon1" || text == "upsilon2") {
    c.kind = CurveSourceKind::builtin;
    c.builtin = text;
  } else if (ends_with(text, ".csv")) {
    c.kind = CurveSourceKind::csv;
    c.csv_path = text;
  } else if (std::count(text.begin(), text.end(), ';') == 2) {
    c.kind = CurveSourceKind::expressions;
    std::stringstream ss(text);
    for (auto& part : c.components) {
      std::getline(ss, part, ';');
      part = trim(part);
    }
  } else {
    throw ValidationError("--curve must be upsilon1, upsilon2, a .csv path, or three expressions 'x; y; z'");
  }
  return c;
}

CurveSource CurveSource::generator(const std::string& psi, double s0) {
  CurveSource c;
  c.kind = CurveSourceKind::generator;
  c.psi = psi;
  c.psi_s0 = s0;
  return c;
}

void RunConfig::validate() const {
  if (epsilon != 1 && epsilon != -1) throw ValidationError("epsilon must be +1 or -1");
  const auto name = manifold_name();
  if (name != "n3" && name != "q3" && name != "user") throw ValidationError("unknown manifold '" + name + "'");
  if (name == "user" && !user) throw ValidationError("manifold 'user' needs metric, phi, xi and eta tables");
  if (probes < 1) throw ValidationError("probe count must be positive");
  if (n < 2) throw ValidationError("the grid needs at least two points (n >= 2)");
  if (tol && !(*tol > 0)) throw ValidationError("tolerance must be positive");
  if (!(normality_tol > 0)) throw ValidationError("normality tolerance must be positive");
  if (from && to && !(*from < *to)) throw ValidationError("interval needs from < to");
}

double RunConfig::tolerance(Command c) const {
  if (tol) return *tol;
  return c == Command::verify_manifold ? 1e-10 : 1e-8;
}

std::string RunConfig::manifold_name() const {
  if (!manifold.empty()) return manifold;
  return curve.kind == CurveSourceKind::generator ? "q3" : "n3";
}

RunConfig load_config(const config::Document& doc) {
  const auto unknown = doc.unknown_keys(kKnownKeys);
  if (!unknown.empty()) throw ValidationError("unknown config key '" + unknown.front() + "'");

  RunConfig cfg;
  if (auto v = doc.number("seed")) {
    if (*v < 0 || *v != std::floor(*v)) throw ValidationError("seed must be a non-negative integer");
    cfg.seed = static_cast<unsigned long long>(*v);
  }
  if (auto v = doc.string("manifold.name")) cfg.manifold = *v;
  if (auto v = doc.integer("manifold.epsilon")) cfg.epsilon = *v;
  if (auto v = doc.integer("manifold.probes")) cfg.probes = *v;
  if (doc.has("manifold.metric") || doc.has("manifold.phi") || doc.has("manifold.xi") || doc.has("manifold.eta")) {
    UserStructureSpec u;
    for (const char* key : {"manifold.metric", "manifold.phi", "manifold.xi", "manifold.eta"})
      if (!doc.has(key)) throw ValidationError(std::string("user structure is missing '") + key + "'");
    u.metric = fixed_strings<9>(doc, "manifold.metric");
    u.phi = fixed_strings<9>(doc, "manifold.phi");
    u.xi = fixed_strings<3>(doc, "manifold.xi");
    u.eta = fixed_strings<3>(doc, "manifold.eta");
    u.domain = doc.string("manifold.domain").value_or("");
    u.probe_box.lo = fixed_vec(doc, "manifold.probe_lo", u.probe_box.lo);
    u.probe_box.hi = fixed_vec(doc, "manifold.probe_hi", u.probe_box.hi);
    cfg.user = u;
    if (cfg.manifold.empty()) cfg.manifold = "user";
  }

  int sources = 0;
  if (auto v = doc.string("curve.builtin")) {
    cfg.curve = CurveSource::from_flag(*v);
    if (cfg.curve.kind != CurveSourceKind::builtin) throw ValidationError("unknown built-in curve '" + *v + "'");
    ++sources;
  }
  if (doc.has("curve.components")) {
    cfg.curve = CurveSource{};
    cfg.curve.kind = CurveSourceKind::expressions;
    cfg.curve.components = fixed_strings<3>(doc, "curve.components");
    ++sources;
  }
  if (auto v = doc.string("curve.csv")) {
    cfg.curve = CurveSource{};
    cfg.curve.kind = CurveSourceKind::csv;
    cfg.curve.csv_path = *v;
    ++sources;
  }
  if (auto v = doc.string("curve.psi")) {
    cfg.curve = CurveSource::generator(*v, doc.number("curve.psi_s0").value_or(0.0));
    ++sources;
  }
  if (sources > 1) throw ValidationError("exactly one curve source may be given");

  cfg.from = doc.number("grid.from");
  cfg.to = doc.number("grid.to");
  if (auto v = doc.integer("grid.n")) cfg.n = *v;
  cfg.tol = doc.number("tolerances.tol");
  if (auto v = doc.number("tolerances.normality")) cfg.normality_tol = *v;
  cfg.theta = doc.string("spherical.theta").value_or("");
  cfg.alpha = doc.string("spherical.alpha").value_or("");
  cfg.out = doc.string("output.out").value_or("");
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) { return load_config(config::Document::parse_file(path)); }

StructureTensors make_manifold(const RunConfig& cfg) {
  const auto name = cfg.manifold_name();
  if (name != "user") return builtin_manifold(name, cfg.epsilon);
  if (!cfg.user) throw ValidationError("manifold 'user' needs metric, phi, xi and eta tables");
  UserStructureSpec spec = *cfg.user;
  spec.epsilon = cfg.epsilon;
  return user_manifold(spec);
}

Curve make_curve(const RunConfig& cfg) {
  switch (cfg.curve.kind) {
    case CurveSourceKind::builtin: return builtin_legendre(cfg.curve.builtin);
    case CurveSourceKind::expressions: {
      const auto [lo, hi] = require_interval(cfg, "an expression curve");
      const auto& c = cfg.curve.components;
      return expression_curve("(" + c[0] + ", " + c[1] + ", " + c[2] + ")", c, lo, hi);
    }
    case CurveSourceKind::csv: return read_curve_csv_file(cfg.curve.csv_path);
    case CurveSourceKind::generator: return make_generator(cfg).curve;
    case CurveSourceKind::none: break;
  }
  throw ValidationError("no curve source: use --curve or --psi");
}

std::vector<double> make_grid(const RunConfig& cfg, const Curve& curve) {
  // Built-in curves default to the windows used in the examples: (-2, 2) and (0.5, 4).
  const bool builtin = cfg.curve.kind == CurveSourceKind::builtin;
  const bool second = builtin && cfg.curve.builtin == "upsilon2";
  double lo = cfg.from.value_or(builtin ? (second ? 0.5 : -2.0) : curve.s_min());
  double hi = cfg.to.value_or(builtin ? (second ? 4.0 : 2.0) : curve.s_max());
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw ValidationError("grid interval is empty");
  // Exact nodes, except that an end on the boundary of the open parameter interval moves inside.
  const double inset = 1e-6 * (hi - lo);
  std::vector<double> grid(cfg.n);
  for (int i = 0; i < cfg.n; ++i) grid[i] = lo + (hi - lo) * i / (cfg.n - 1);
  grid.front() = std::max(grid.front(), curve.s_min() + inset);
  grid.back() = std::min(grid.back(), curve.s_max() - inset);
  if (!(grid.front() < grid.back())) throw ValidationError("grid interval is empty");
  return grid;
}

// ---------------------------------------------------------------------------------------------

CommandResult verify_manifold(const RunConfig& cfg) {
  const auto m = make_manifold(cfg);
  const double tol = cfg.tolerance(Command::verify_manifold);
  const auto probes = probe_points(m, cfg.probes, cfg.seed);

  json axioms = json::object();
  bool pass = true;
  for (const auto& report : {check_almost_contact(m, probes, tol), check_compatibility(m, probes, tol)}) {
    for (const auto& a : report.axioms) {
      axioms[a.name] = {{"residual", a.residual}, {"pass", a.pass}};
      pass = pass && a.pass;
    }
  }
  double normality = 0.0, nabla_xi = 0.0;
  const Mat3 basis = Mat3::Identity();
  for (const auto& p : probes) {
    for (int i = 0; i < 3; ++i) {
      nabla_xi = std::max(nabla_xi, nabla_xi_residual(m, p, basis.col(i)));
      for (int j = i + 1; j < 3; ++j) normality = std::max(normality, normality_residual(m, p, basis.col(i), basis.col(j)));
    }
  }
  const bool normal = normality < cfg.normality_tol;
  axioms["normality"] = {{"residual", normality}, {"pass", normal}, {"tolerance", cfg.normality_tol}};
  pass = pass && normal;

  json samples = json::array();
  double a_min = INFINITY, a_max = -INFINITY, b_min = INFINITY, b_max = -INFINITY;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto ab = alpha_beta(m, probes[i]);
    a_min = std::min(a_min, ab.alpha);
    a_max = std::max(a_max, ab.alpha);
    b_min = std::min(b_min, ab.beta);
    b_max = std::max(b_max, ab.beta);
    if (i < 5) samples.push_back({{"point", point_json(probes[i])}, {"alpha", ab.alpha}, {"beta", ab.beta}});
  }
  const auto qs = check_quasi_sasakian(m, probes, cfg.normality_tol);

  json j = {{"command", "verify-manifold"},
            {"manifold", m.name},
            {"epsilon", m.epsilon},
            {"seed", cfg.seed},
            {"probes", probes.size()},
            {"tolerance", tol},
            {"axioms", axioms},
            {"nabla_xi_identity_residual", nabla_xi},
            {"alpha_beta_samples", samples},
            {"alpha_range", {a_min, a_max}},
            {"beta_range", {b_min, b_max}},
            {"quasi_sasakian", qs.quasi_sasakian},
            {"max_abs_beta", qs.max_abs_beta},
            {"max_abs_xi_alpha", qs.max_abs_xi_alpha},
            {"pass", pass}};
  CommandResult r;
  r.primary = dump(j);
  r.exit_code = pass ? kSuccess : kValidationFailure;
  if (!pass) r.messages.push_back("structure verification failed; see the axiom residuals");
  return r;
}

CommandResult analyze_curve(const RunConfig& cfg) {
  const auto m = make_manifold(cfg);
  const auto curve = make_curve(cfg);
  const auto grid = make_grid(cfg, curve);
  const double tol = cfg.tolerance(Command::analyze_curve);
  FrenetOptions opt;
  const bool legendre = is_legendre(m, curve, grid, opt.legendre_tol).legendre;

  std::ostringstream csv;
  csv << "s,x,y,z,m,speed2,causal,kappa_direct,tau_direct,kappa_formula,tau_formula,theta,delta,theta1,etaN,etaB,"
         "frenet_residual\n";
  double max_dk = 0.0, max_dt = 0.0, max_res = 0.0, max_m = 0.0, max_speed_dev = 0.0;
  std::map<std::string, int> flags;
  auto note = [&](const Cell& c) {
    if (!c.ok()) ++flags[c.flag];
  };

  for (double s : grid) {
    std::vector<Cell> row{Cell::of(s)};
    CurveSample smp;
    try {
      smp = sample(m, curve, s);
    } catch (const DomainError& e) {
      for (int i = 0; i < 16; ++i) row.push_back(Cell::flagged("domain"));
      ++flags["domain"];
      write_row(csv, row);
      continue;
    }
    row.push_back(Cell::of(smp.position.x()));
    row.push_back(Cell::of(smp.position.y()));
    row.push_back(Cell::of(smp.position.z()));
    row.push_back(Cell::of(smp.m));
    row.push_back(Cell::of(smp.speed2));
    row.push_back(Cell::flagged(to_string(causal_character(m, smp.position, smp.velocity))));
    max_m = std::max(max_m, std::abs(smp.m));
    max_speed_dev = std::max(max_speed_dev, std::abs(std::abs(smp.speed2) - 1));

    // Frame columns: kappa_direct … frenet_residual. A geodesic point flags all of them.
    std::vector<Cell> frame(10);
    try {
      const auto f = frenet_direct(m, curve, s, opt);
      frame[0] = Cell::of(f.kappa);
      frame[1] = Cell::of(f.tau);
      try {
        frame[9] = Cell::of(frenet_residuals(m, curve, f, opt).max());
      } catch (const Error& e) {
        frame[9] = Cell::flagged(flag_of(e));
      }
    } catch (const GeodesicError&) {
      std::fill(frame.begin(), frame.end(), Cell::flagged("geodesic"));
    } catch (const Error& e) {
      frame[0] = frame[1] = frame[9] = Cell::flagged(flag_of(e));
    }
    if (frame[0].flag != "geodesic") {
      try {
        if (legendre) {
          const auto k = legendre_kappa_tau(m, curve, s, opt);
          frame[2] = Cell::of(k.kappa);
          frame[3] = Cell::of(k.tau);
        } else {
          const auto k = general_kappa_tau(m, curve, s, opt);
          frame[2] = Cell::of(k.kappa);
          frame[3] = Cell::of(k.tau);
        }
      } catch (const Error& e) {
        frame[2] = frame[3] = Cell::flagged(flag_of(e));
      }
      try {
        const auto v = vframe(m, curve, s, opt);
        frame[4] = Cell::of(v.theta);
        frame[5] = Cell::of(v.delta);
        frame[6] = Cell::of(v.theta1);
      } catch (const Error& e) {
        frame[4] = frame[5] = frame[6] = Cell::flagged(flag_of(e));
      }
      try {
        const auto d = reeb_decomposition_general(m, curve, s, opt);
        frame[7] = Cell::of(d.eta_n);
        frame[8] = Cell::of(d.eta_b);
      } catch (const Error& e) {
        frame[7] = frame[8] = Cell::flagged(flag_of(e));
      }
    }
    if (frame[0].ok() && frame[2].ok()) {
      max_dk = std::max(max_dk, std::abs(frame[0].value - frame[2].value));
      max_dt = std::max(max_dt, std::abs(frame[1].value - frame[3].value));
    }
    if (frame[9].ok()) max_res = std::max(max_res, frame[9].value);
    for (const auto& c : frame) note(c);
    row.insert(row.end(), frame.begin(), frame.end());
    write_row(csv, row);
  }

  json j = {{"command", "analyze-curve"},
            {"manifold", m.name},
            {"epsilon", m.epsilon},
            {"curve", curve.label()},
            {"rows", grid.size()},
            {"formula", legendre ? "legendre" : "general"},
            {"max_abs_m", max_m},
            {"max_unit_speed_deviation", max_speed_dev},
            {"max_kappa_disagreement", max_dk},
            {"max_tau_disagreement", max_dt},
            {"max_frenet_residual", max_res},
            {"tolerance", tol},
            {"flagged_cells", flags}};
  CommandResult r;
  r.primary = csv.str();
  r.summary = dump(j);
  if (flags.count("geodesic")) r.messages.push_back("geodesic points flagged: " + std::to_string(flags["geodesic"]));
  return r;
}

CommandResult gen_legendre(const RunConfig& cfg) {
  if (cfg.curve.kind != CurveSourceKind::generator) throw ValidationError("gen-legendre needs --psi");
  const auto gen = make_generator(cfg);
  const auto q3 = builtin_manifold("q3", cfg.epsilon);
  const auto grid = make_grid(cfg, gen.curve);
  const double tol = cfg.tolerance(Command::gen_legendre);

  std::ostringstream curve_csv, table;
  write_curve_csv(curve_csv, gen.curve, grid);
  table << "s,x,y,z,mu2,kappa_k2,tau_k2,kappa_frenet,tau_frenet,alpha_abs,status\n";
  int geodesic = 0;
  double max_dk = 0.0, max_dt = 0.0, max_alpha = 0.0;
  for (double s : grid) {
    const Point p = gen.curve.position(s);
    std::vector<Cell> row{Cell::of(s), Cell::of(p.x()), Cell::of(p.y()), Cell::of(p.z()), Cell::of(gen.mu2(s))};
    std::string status = "ok";
    Cell kk, kt, fk, ft;
    try {
      const auto k = kappa_tau_k2(gen, s);
      kk = Cell::of(k.kappa);
      kt = Cell::of(k.tau);
      max_alpha = std::max(max_alpha, k.alpha_residual);
    } catch (const Error& e) {
      kk = kt = Cell::flagged(flag_of(e));
      status = flag_of(e);
    }
    try {
      const auto f = frenet_direct(q3, gen.curve, s);
      fk = Cell::of(f.kappa);
      ft = Cell::of(f.tau);
    } catch (const Error& e) {
      fk = ft = Cell::flagged(flag_of(e));
      status = flag_of(e);
    }
    if (status == "geodesic") ++geodesic;
    if (kk.ok() && fk.ok()) {
      max_dk = std::max(max_dk, std::abs(kk.value - fk.value));
      max_dt = std::max(max_dt, std::abs(kt.value - ft.value));
    }
    row.insert(row.end(), {kk, kt, fk, ft, Cell::of(std::abs(alpha_beta(q3, p).alpha)), Cell::flagged(status)});
    write_row(table, row);
  }

  const auto leg = is_legendre(q3, gen.curve, grid, tol);
  const auto unit = is_unit_speed(q3, gen.curve, grid, tol);
  json j = {{"command", "gen-legendre"},
            {"psi", gen.psi.psi.str()},
            {"psi_s0", gen.psi.s0},
            {"epsilon", cfg.epsilon},
            {"interval", {gen.lo, gen.hi}},
            {"rows", grid.size()},
            {"legendre", leg.legendre},
            {"max_abs_eta", leg.max_abs_m},
            {"chart_condition_residuals", {leg.chart_condition_1, leg.chart_condition_2}},
            {"unit_speed", unit.unit_speed},
            {"max_unit_speed_deviation", unit.max_deviation},
            {"max_kappa_disagreement", max_dk},
            {"max_tau_disagreement", max_dt},
            {"max_tau_alpha_residual", max_alpha},
            {"geodesic_rows", geodesic}};
  CommandResult r;
  if (geodesic == static_cast<int>(grid.size())) {
    j["notice"] = "geodesic";
    r.messages.push_back("psi = " + gen.psi.psi.str() + " generates a geodesic: the curvature vanishes on the grid");
  }
  r.primary = curve_csv.str();
  r.secondary["_kappa_tau.csv"] = table.str();
  r.summary = dump(j);
  return r;
}

CommandResult check_spherical(const RunConfig& cfg) {
  const double tol = cfg.tolerance(Command::check_spherical);
  SphericalReport report;
  json source;
  if (!cfg.theta.empty()) {
    const auto [lo, hi] = require_interval(cfg, "a theta profile");
    const std::string alpha = cfg.alpha.empty() ? "1" : cfg.alpha;
    report = classify_spherical(scalar_expression(cfg.theta), scalar_expression(alpha), cfg.epsilon,
                                numeric::uniform_grid(lo, hi, cfg.n), tol);
    source = {{"kind", "profile"}, {"theta", cfg.theta}, {"alpha", alpha}};
  } else {
    const auto m = make_manifold(cfg);
    const auto curve = make_curve(cfg);
    report = classify_spherical(m, curve, make_grid(cfg, curve), tol);
    source = {{"kind", "curve"}, {"curve", curve.label()}, {"manifold", m.name}};
  }

  json profile = json::array();
  for (std::size_t i = 0; i < report.s.size(); ++i)
    profile.push_back({{"s", report.s[i]}, {"residual", json_safe(report.residual[i])},
                       {"radius2", json_safe(report.radius2[i])}});
  json j = {{"command", "check-spherical"},
            {"source", source},
            {"epsilon", report.epsilon},
            {"tolerance", tol},
            {"verdict", to_string(report.verdict)},
            {"max_abs_residual", report.max_abs_residual},
            {"min_abs_residual", report.min_abs_residual},
            {"radius2_variation", report.radius2_variation},
            {"theta_constant", report.theta_constant},
            {"theta_exponential", report.theta_exponential},
            {"notes", report.notes},
            {"profile", profile}};
  if (report.has_center_check) {
    j["max_center_speed"] = report.max_center_speed;
    j["center_consistency"] = report.center_consistency;
  }
  CommandResult r;
  r.primary = dump(j);
  r.messages.push_back("verdict: " + to_string(report.verdict));
  return r;
}

CommandResult plot(const RunConfig& cfg) {
  const auto curve = make_curve(cfg);
  const auto grid = make_grid(cfg, curve);
  if (grid.empty()) throw ValidationError("empty grid");
  std::vector<Vec3> pts;
  pts.reserve(grid.size());
  for (double s : grid) {
    const Vec3 p = curve.jet(s).position;
    if (!p.allFinite()) throw DomainError("curve position is not finite at s = " + format_number(s));
    pts.push_back(p);
  }

  constexpr double panel = 300, gap = 20, top = 40;
  const char* names[3] = {"x", "y", "z"};
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  char buf[256];
  std::ostringstream svg;
  const double width = 3 * panel + 4 * gap, height = panel + top + 2 * gap;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  svg << buf;
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string title = curve.label();
  for (const auto& [from, to] : {std::pair{"&", "&amp;"}, std::pair{"<", "&lt;"}, std::pair{">", "&gt;"}}) {
    for (std::size_t at = title.find(from); at != std::string::npos; at = title.find(from, at + std::string(to).size()))
      title.replace(at, 1, to);
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"24\" font-family=\"monospace\" font-size=\"14\">", gap);
  svg << buf << title << "</text>\n";

  for (int k = 0; k < 3; ++k) {
    const int a = pairs[k][0], b = pairs[k][1];
    const double x0 = gap + k * (panel + gap), y0 = top;
    double lo_a = INFINITY, hi_a = -INFINITY, lo_b = INFINITY, hi_b = -INFINITY;
    for (const auto& p : pts) {
      lo_a = std::min(lo_a, p[a]);
      hi_a = std::max(hi_a, p[a]);
      lo_b = std::min(lo_b, p[b]);
      hi_b = std::max(hi_b, p[b]);
    }
    // Equal scales on both axes; a flat extent is centred in the panel.
    const double extent = std::max({hi_a - lo_a, hi_b - lo_b, 1e-12});
    const double scale = (panel - 2 * gap) / extent;
    const double ca = 0.5 * (lo_a + hi_a), cb = 0.5 * (lo_b + hi_b);
    auto px = [&](double v) { return x0 + 0.5 * panel + (v - ca) * scale; };
    auto py = [&](double v) { return y0 + 0.5 * panel - (v - cb) * scale; };

    std::snprintf(buf, sizeof buf,
                  "<g id=\"%s%s\">\n<rect x=\"%.1f\" y=\"%.1f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" "
                  "stroke=\"#888\"/>\n",
                  names[a], names[b], x0, y0, panel, panel);
    svg << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\">%s%s  %s in [%.4g, %.4g]  %s in "
                  "[%.4g, %.4g]</text>\n",
                  x0, y0 + panel + 14, names[a], names[b], names[a], lo_a, hi_a, names[b], lo_b, hi_b);
    svg << buf;
    svg << "<path fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " L" : "M", px(pts[i][a]), py(pts[i][b]));
      svg << buf;
    }
    svg << "\"/>\n</g>\n";
  }
  svg << "</svg>\n";

  CommandResult r;
  r.primary = svg.str();
  return r;
}

CommandResult run(Command c, const RunConfig& cfg) {
  CommandResult r;
  try {
    cfg.validate();
    switch (c) {
      case Command::verify_manifold: return verify_manifold(cfg);
      case Command::analyze_curve: return analyze_curve(cfg);
      case Command::gen_legendre: return gen_legendre(cfg);
      case Command::check_spherical: return check_spherical(cfg);
      case Command::plot: return plot(cfg);
    }
  } catch (const ValidationError& e) {
    r.exit_code = kValidationFailure;
    r.messages.push_back(std::string("error: ") + e.what());
  } catch (const HypothesisError& e) {
    r.exit_code = kHypothesisFailure;
    r.messages.push_back(std::string("hypothesis failure: ") + e.what());
  } catch (const DomainError& e) {
    r.exit_code = kHypothesisFailure;
    r.messages.push_back(std::string("domain error: ") + e.what());
  } catch (const std::exception& e) {
    r.exit_code = kValidationFailure;
    r.messages.push_back(std::string("error: ") + e.what());
  }
  return r;
}

}  // namespace acpm::cli
