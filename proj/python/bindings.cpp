#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acpm/cli.hpp"
#include "acpm/connection.hpp"
#include "acpm/errors.hpp"
#include "acpm/expr.hpp"
#include "acpm/frenet.hpp"
#include "acpm/legendre.hpp"
#include "acpm/manifold.hpp"
#include "acpm/spherical.hpp"

namespace py = pybind11;
using namespace acpm;

namespace {

Point to_point(const Vec3& v) { return Point(v); }

StructureReport merged_report(const StructureTensors& m, const std::vector<Point>& probes, double tol) {
  StructureReport r = check_almost_contact(m, probes, tol);
  const auto c = check_compatibility(m, probes, tol);
  r.axioms.insert(r.axioms.end(), c.axioms.begin(), c.axioms.end());
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Almost contact pseudo-metric 3-manifolds, Legendre curves and sphericity";

  auto error = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(mod, "ValidationError", error.ptr());
  py::register_exception<ParseError>(mod, "ParseError", validation.ptr());
  py::register_exception<DomainError>(mod, "DomainError", error.ptr());
  auto hypothesis = py::register_exception<HypothesisError>(mod, "HypothesisError", error.ptr());
  py::register_exception<GeodesicError>(mod, "GeodesicError", hypothesis.ptr());
  py::register_exception<DegenerateError>(mod, "DegenerateError", hypothesis.ptr());
  py::register_exception<NotLegendreError>(mod, "NotLegendreError", hypothesis.ptr());

  // Structures ----------------------------------------------------------------------------------
  py::class_<StructureTensors>(mod, "Manifold")
      .def_readonly("name", &StructureTensors::name)
      .def_readonly("epsilon", &StructureTensors::epsilon)
      .def("metric", [](const StructureTensors& m, const Vec3& p) { return m.metric(to_point(p)); })
      .def("phi", [](const StructureTensors& m, const Vec3& p) { return m.phi(to_point(p)); })
      .def("xi", [](const StructureTensors& m, const Vec3& p) { return m.xi(to_point(p)); })
      .def("eta", [](const StructureTensors& m, const Vec3& p) { return m.eta(to_point(p)); })
      .def("contains", [](const StructureTensors& m, const Vec3& p) { return m.contains(to_point(p)); })
      .def("__repr__", [](const StructureTensors& m) {
        return "<Manifold " + m.name + " epsilon=" + std::to_string(m.epsilon) + ">";
      });

  mod.def("builtin_manifold", &builtin_manifold, py::arg("name"), py::arg("epsilon") = 1);
  mod.def(
      "probe_points",
      [](const StructureTensors& m, int count, unsigned long long seed) {
        std::vector<Vec3> out;
        for (const auto& p : probe_points(m, count, seed)) out.push_back(p.coords);
        return out;
      },
      py::arg("manifold"), py::arg("count"), py::arg("seed"));
  mod.def(
      "axiom_residuals",
      [](const StructureTensors& m, int count, unsigned long long seed, double tol) {
        py::dict out;
        for (const auto& a : merged_report(m, probe_points(m, count, seed), tol).axioms) out[a.name.c_str()] = a.residual;
        return out;
      },
      py::arg("manifold"), py::arg("probes") = 100, py::arg("seed") = 1, py::arg("tol") = 1e-10,
      "Maximum residual of each almost contact and compatibility axiom over seeded probes.");
  mod.def(
      "normality_residual",
      [](const StructureTensors& m, const Vec3& p, const Vec3& x, const Vec3& y) {
        return normality_residual(m, to_point(p), x, y);
      },
      py::arg("manifold"), py::arg("point"), py::arg("x"), py::arg("y"));
  mod.def(
      "alpha_beta",
      [](const StructureTensors& m, const Vec3& p) {
        const auto ab = alpha_beta(m, to_point(p));
        return py::make_tuple(ab.alpha, ab.beta);
      },
      py::arg("manifold"), py::arg("point"));
  mod.def(
      "christoffel",
      [](const StructureTensors& m, const Vec3& p) {
        const auto g = christoffel(m, to_point(p));
        return std::vector<Mat3>(g.upper.begin(), g.upper.end());
      },
      py::arg("manifold"), py::arg("point"), "Gamma^k_ij as a list of three matrices indexed [k][i, j].");
  mod.def(
      "is_quasi_sasakian",
      [](const StructureTensors& m, int count, unsigned long long seed, double tol) {
        return check_quasi_sasakian(m, probe_points(m, count, seed), tol).quasi_sasakian;
      },
      py::arg("manifold"), py::arg("probes") = 100, py::arg("seed") = 1, py::arg("tol") = 1e-8);

  // Curves --------------------------------------------------------------------------------------
  py::class_<Curve>(mod, "Curve")
      .def_property_readonly("label", &Curve::label)
      .def_property_readonly("s_min", &Curve::s_min)
      .def_property_readonly("s_max", &Curve::s_max)
      .def("position", [](const Curve& c, double s) { return c.position(s).coords; })
      .def("velocity", [](const Curve& c, double s) { return c.jet(s).d1; })
      .def("acceleration", [](const Curve& c, double s) { return c.jet(s).d2; });

  mod.def("builtin_legendre", &builtin_legendre, py::arg("name"));
  mod.def("expression_curve", &expression_curve, py::arg("label"), py::arg("components"), py::arg("s_min"),
          py::arg("s_max"));
  mod.def("read_curve_csv", &read_curve_csv_file, py::arg("path"));
  mod.def(
      "geodesic_curve",
      [](const StructureTensors& m, const Vec3& p0, const Vec3& v0, double s0, double lo, double hi) {
        return geodesic_curve(m, to_point(p0), v0, s0, lo, hi);
      },
      py::arg("manifold"), py::arg("p0"), py::arg("v0"), py::arg("s0"), py::arg("s_min"), py::arg("s_max"));
  mod.def("uniform_grid", &numeric::uniform_grid, py::arg("lo"), py::arg("hi"), py::arg("count"));

  // Frenet apparatus ----------------------------------------------------------------------------
  py::class_<FrenetData>(mod, "FrenetData")
      .def_readonly("s", &FrenetData::s)
      .def_readonly("T", &FrenetData::T)
      .def_readonly("N", &FrenetData::N)
      .def_readonly("B", &FrenetData::B)
      .def_readonly("kappa", &FrenetData::kappa)
      .def_readonly("tau", &FrenetData::tau)
      .def_readonly("tau_signed", &FrenetData::tau_signed)
      .def_readonly("sign_n", &FrenetData::sign_n)
      .def_readonly("sign_b", &FrenetData::sign_b);
  py::class_<LegendreKappaTau>(mod, "LegendreKappaTau")
      .def_readonly("kappa", &LegendreKappaTau::kappa)
      .def_readonly("tau", &LegendreKappaTau::tau)
      .def_readonly("theta", &LegendreKappaTau::theta)
      .def_readonly("theta_prime", &LegendreKappaTau::theta_prime)
      .def_readonly("tau_signed", &LegendreKappaTau::tau_signed)
      .def_readonly("tau_signed_alt", &LegendreKappaTau::tau_signed_alt);
  py::class_<GeneralKappaTau>(mod, "GeneralKappaTau")
      .def_readonly("kappa", &GeneralKappaTau::kappa)
      .def_readonly("tau", &GeneralKappaTau::tau)
      .def_readonly("tau_signed", &GeneralKappaTau::tau_signed)
      .def_readonly("m", &GeneralKappaTau::m)
      .def_readonly("delta", &GeneralKappaTau::delta)
      .def_readonly("theta1", &GeneralKappaTau::theta1);

  const auto no_opts = [](auto fn) {
    return [fn](const StructureTensors& m, const Curve& c, double s) { return fn(m, c, s, FrenetOptions{}); };
  };
  mod.def("frenet_direct", no_opts(&frenet_direct), py::arg("manifold"), py::arg("curve"), py::arg("s"));
  mod.def("legendre_kappa_tau", no_opts(&legendre_kappa_tau), py::arg("manifold"), py::arg("curve"), py::arg("s"));
  mod.def("general_kappa_tau", no_opts(&general_kappa_tau), py::arg("manifold"), py::arg("curve"), py::arg("s"));
  mod.def(
      "frenet_residual",
      [](const StructureTensors& m, const Curve& c, double s) {
        return frenet_residuals(m, c, frenet_direct(m, c, s)).max();
      },
      py::arg("manifold"), py::arg("curve"), py::arg("s"));
  mod.def(
      "reeb_identity_residual",
      [](const StructureTensors& m, const Curve& c, double s) {
        return reeb_decomposition_general(m, c, s).identity_residual;
      },
      py::arg("manifold"), py::arg("curve"), py::arg("s"), "|eta(B)^2 + eps*eta(N)^2 - delta^2|");

  // Legendre generator --------------------------------------------------------------------------
  py::class_<GeneratedLegendre>(mod, "GeneratedLegendre")
      .def_readonly("curve", &GeneratedLegendre::curve)
      .def_readonly("lo", &GeneratedLegendre::lo)
      .def_readonly("hi", &GeneratedLegendre::hi)
      .def("mu2", &GeneratedLegendre::mu2, py::arg("s"));
  py::class_<KappaTauK2>(mod, "KappaTauK2")
      .def_readonly("kappa", &KappaTauK2::kappa)
      .def_readonly("kappa_signed", &KappaTauK2::kappa_signed)
      .def_readonly("tau", &KappaTauK2::tau)
      .def_readonly("mu2", &KappaTauK2::mu2)
      .def_readonly("alpha_residual", &KappaTauK2::alpha_residual);
  mod.def(
      "generate_legendre_q3",
      [](const std::string& psi, double lo, double hi, double s0, int cells) {
        return generate_legendre_q3(AngleFunction::parse(psi, s0), lo, hi, cells);
      },
      py::arg("psi"), py::arg("lo"), py::arg("hi"), py::arg("s0") = 0.0, py::arg("cells") = 4096);
  mod.def("kappa_tau_k2", py::overload_cast<const GeneratedLegendre&, double>(&kappa_tau_k2), py::arg("generated"),
          py::arg("s"));

  // Spherical characterization ------------------------------------------------------------------
  py::enum_<SphericalVerdict>(mod, "SphericalVerdict")
      .value("spherical", SphericalVerdict::spherical)
      .value("not_spherical", SphericalVerdict::not_spherical)
      .value("excluded_case", SphericalVerdict::excluded_case);
  py::class_<SphericalReport>(mod, "SphericalReport")
      .def_property_readonly("verdict", [](const SphericalReport& r) { return to_string(r.verdict); })
      .def_readonly("epsilon", &SphericalReport::epsilon)
      .def_readonly("s", &SphericalReport::s)
      .def_readonly("residual", &SphericalReport::residual)
      .def_readonly("radius2", &SphericalReport::radius2)
      .def_readonly("max_abs_residual", &SphericalReport::max_abs_residual)
      .def_readonly("min_abs_residual", &SphericalReport::min_abs_residual)
      .def_readonly("radius2_variation", &SphericalReport::radius2_variation)
      .def_readonly("theta_constant", &SphericalReport::theta_constant)
      .def_readonly("theta_exponential", &SphericalReport::theta_exponential)
      .def_readonly("notes", &SphericalReport::notes);
  py::class_<ThetaSolution>(mod, "ThetaSolution")
      .def_property_readonly("epsilon", &ThetaSolution::epsilon)
      .def("theta", &ThetaSolution::theta, py::arg("s"))
      .def("inverse_theta", &ThetaSolution::inverse_theta, py::arg("s"))
      .def("theta_prime", &ThetaSolution::theta_prime, py::arg("s"));
  mod.def(
      "theta_solution",
      [](const std::string& kind, double c1, double c2, const ScalarFn& alpha, double s0, double lo, double hi) {
        return theta_solution(theta_kind_from_string(kind), c1, c2, alpha, s0, lo, hi);
      },
      py::arg("kind"), py::arg("c1"), py::arg("c2"), py::arg("alpha"), py::arg("s0"), py::arg("lo"), py::arg("hi"));
  mod.def(
      "classify_spherical",
      [](const StructureTensors& m, const Curve& c, const std::vector<double>& grid, double tol) {
        return classify_spherical(m, c, grid, tol);
      },
      py::arg("manifold"), py::arg("curve"), py::arg("grid"), py::arg("tol") = 1e-8);
  mod.def(
      "classify_profile",
      [](const ScalarFn& theta, const ScalarFn& alpha, int epsilon, const std::vector<double>& grid, double tol) {
        return classify_spherical(theta, alpha, epsilon, grid, tol);
      },
      py::arg("theta"), py::arg("alpha"), py::arg("epsilon"), py::arg("grid"), py::arg("tol") = 1e-8);
  mod.def(
      "classify_solution",
      [](const ThetaSolution& sol, const std::vector<double>& grid, double tol) {
        return classify_spherical(sol, grid, tol);
      },
      py::arg("solution"), py::arg("grid"), py::arg("tol") = 1e-8);

  // Expressions ---------------------------------------------------------------------------------
  py::class_<expr::Expr>(mod, "Expr")
      .def("__str__", &expr::Expr::str)
      .def("__repr__", [](const expr::Expr& e) { return "<Expr " + e.str() + ">"; })
      .def(
          "eval",
          [](const expr::Expr& e, std::optional<double> s, std::optional<double> x, std::optional<double> y,
             std::optional<double> z) { return e.eval(expr::Bindings{s, x, y, z}); },
          py::arg("s") = py::none(), py::arg("x") = py::none(), py::arg("y") = py::none(), py::arg("z") = py::none())
      .def(
          "diff",
          [](const expr::Expr& e, const std::string& var) {
            const auto v = expr::var_from_name(var);
            if (!v) throw ValidationError("unknown variable '" + var + "'");
            return expr::differentiate(e, *v);
          },
          py::arg("var") = "s");
  mod.def("parse", [](const std::string& text) { return expr::parse(text); }, py::arg("text"));

  // Command layer -------------------------------------------------------------------------------
  py::class_<cli::CommandResult>(mod, "CommandResult")
      .def_readonly("exit_code", &cli::CommandResult::exit_code)
      .def_readonly("primary", &cli::CommandResult::primary)
      .def_readonly("summary", &cli::CommandResult::summary)
      .def_readonly("secondary", &cli::CommandResult::secondary)
      .def_readonly("messages", &cli::CommandResult::messages);
  mod.def(
      "run_command",
      [](const std::string& command, const std::string& config, std::optional<std::string> manifold,
         std::optional<int> epsilon, std::optional<std::string> curve, std::optional<std::string> psi,
         std::optional<double> lo, std::optional<double> hi, std::optional<int> n, std::optional<double> tol,
         std::optional<unsigned long long> seed, std::optional<std::string> theta, std::optional<std::string> alpha) {
        cli::RunConfig cfg = config.empty() ? cli::RunConfig{} : cli::load_config_file(config);
        if (manifold) cfg.manifold = *manifold;
        if (epsilon) cfg.epsilon = *epsilon;
        if (curve) cfg.curve = cli::CurveSource::from_flag(*curve);
        if (psi) cfg.curve = cli::CurveSource::generator(*psi);
        if (lo) cfg.from = lo;
        if (hi) cfg.to = hi;
        if (n) cfg.n = *n;
        if (tol) cfg.tol = tol;
        if (seed) cfg.seed = *seed;
        if (theta) cfg.theta = *theta;
        if (alpha) cfg.alpha = *alpha;
        return cli::run(cli::command_from_string(command), cfg);
      },
      py::arg("command"), py::kw_only(), py::arg("config") = "", py::arg("manifold") = py::none(),
      py::arg("epsilon") = py::none(), py::arg("curve") = py::none(), py::arg("psi") = py::none(),
      py::arg("lo") = py::none(), py::arg("hi") = py::none(), py::arg("n") = py::none(), py::arg("tol") = py::none(),
      py::arg("seed") = py::none(), py::arg("theta") = py::none(), py::arg("alpha") = py::none(),
      "Runs a CLI subcommand in-process; the result carries the exit code and the emitted text.");
}
