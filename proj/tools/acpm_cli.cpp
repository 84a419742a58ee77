// acpm: verification, curve analysis, Legendre generation, sphericity checks and plots.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "acpm/cli.hpp"
#include "acpm/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> manifold;
  std::optional<int> epsilon;
  std::optional<std::string> curve;
  std::optional<std::string> psi;
  std::optional<double> psi_s0;
  std::optional<double> from, to;
  std::optional<int> n;
  std::optional<double> tol;
  std::optional<unsigned long long> seed;
  std::optional<int> probes;
  std::optional<std::string> theta, alpha;
  std::optional<std::string> out;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "TOML-style run config; flags override its values");
  sub->add_option("--manifold", f.manifold, "n3, q3 or user");
  sub->add_option("--epsilon", f.epsilon, "causal character of the Reeb field (+1 or -1)");
  sub->add_option("--curve", f.curve, "upsilon1, upsilon2, a .csv path, or 'x; y; z' expressions in s");
  sub->add_option("--psi", f.psi, "angle function psi(s) of the Q3 generator");
  sub->add_option("--psi-s0", f.psi_s0, "anchor s0 of the generator (mu^2(s0) = 0)");
  sub->add_option("--from", f.from, "interval start");
  sub->add_option("--to", f.to, "interval end");
  sub->add_option("--n", f.n, "grid point count");
  sub->add_option("--tol", f.tol, "tolerance");
  sub->add_option("--seed", f.seed, "probe seed");
  sub->add_option("--probes", f.probes, "probe count for verify-manifold");
  sub->add_option("--theta", f.theta, "theta(s) profile for check-spherical");
  sub->add_option("--alpha", f.alpha, "alpha(s) profile for check-spherical (default 1)");
  sub->add_option("--out", f.out, "output path (stdout when omitted)");
}

acpm::cli::RunConfig resolve(const Flags& f) {
  using namespace acpm::cli;
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config_file(f.config);
  if (f.curve && f.psi) throw acpm::ValidationError("give either --curve or --psi, not both");
  if (f.manifold) cfg.manifold = *f.manifold;
  if (f.epsilon) cfg.epsilon = *f.epsilon;
  if (f.curve) cfg.curve = CurveSource::from_flag(*f.curve);
  if (f.psi) cfg.curve = CurveSource::generator(*f.psi, f.psi_s0.value_or(0.0));
  if (f.psi_s0 && !f.psi) cfg.curve.psi_s0 = *f.psi_s0;
  if (f.from) cfg.from = f.from;
  if (f.to) cfg.to = f.to;
  if (f.n) cfg.n = *f.n;
  if (f.tol) cfg.tol = f.tol;
  if (f.seed) cfg.seed = *f.seed;
  if (f.probes) cfg.probes = *f.probes;
  if (f.theta) cfg.theta = *f.theta;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.out) cfg.out = *f.out;
  cfg.validate();
  return cfg;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + suffix;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost contact pseudo-metric 3-manifolds: structures, Legendre curves, sphericity"};
  app.require_subcommand(1);
  Flags flags;
  const char* names[] = {"verify-manifold", "analyze-curve", "gen-legendre", "check-spherical", "plot"};
  const char* help[] = {"check the structure axioms and report alpha, beta (JSON)",
                        "per-sample curvature and torsion table (CSV) with a JSON summary",
                        "generate a Q3 Legendre curve from psi (curve CSV and kappa/tau table)",
                        "classify a Legendre curve or a theta profile as spherical or not (JSON)",
                        "xy, xz and yz projections of a curve (SVG)"};
  for (int i = 0; i < 5; ++i) add_flags(app.add_subcommand(names[i], help[i]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : acpm::cli::kValidationFailure;
  }

  using namespace acpm::cli;
  const auto command = command_from_string(app.get_subcommands().front()->get_name());
  CommandResult result;
  RunConfig cfg;
  try {
    cfg = resolve(flags);
    result = run(command, cfg);
  } catch (const acpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailure;
  }

  for (const auto& m : result.messages) std::cerr << m << '\n';
  if (result.exit_code != kSuccess && result.primary.empty()) return result.exit_code;

  if (cfg.out.empty()) {
    std::cout << (result.secondary.empty() ? result.primary : result.secondary.begin()->second);
    if (!result.summary.empty()) std::cerr << result.summary;
  } else {
    bool ok = write_file(cfg.out, result.primary);
    for (const auto& [suffix, content] : result.secondary) ok = write_file(sibling_path(cfg.out, suffix), content) && ok;
    if (!ok) {
      std::cerr << "error: cannot write output next to '" << cfg.out << "'\n";
      return kValidationFailure;
    }
    if (!result.summary.empty()) std::cout << result.summary;
  }
  return result.exit_code;
}
