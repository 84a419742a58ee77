#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acpm/config.hpp"
#include "acpm/curve.hpp"
#include "acpm/manifold.hpp"

namespace acpm::cli {

enum class Command { verify_manifold, analyze_curve, gen_legendre, check_spherical, plot };

Command command_from_string(const std::string& name);
std::string to_string(Command c);

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kHypothesisFailure = 2 };

enum class CurveSourceKind { none, builtin, expressions, csv, generator };

struct CurveSource {
  CurveSourceKind kind = CurveSourceKind::none;
  std::string builtin;                     // "upsilon1" | "upsilon2"
  std::array<std::string, 3> components;   // expressions in s
  std::string csv_path;
  std::string psi;                         // generator angle function
  double psi_s0 = 0.0;

  /// Reads the --curve flag: a built-in name, a path ending in ".csv", or "x; y; z".
  static CurveSource from_flag(const std::string& text);
  static CurveSource generator(const std::string& psi, double s0 = 0.0);
};

struct RunConfig {
  /// "n3", "q3" or "user". Empty selects q3 for generator curves and n3 otherwise.
  std::string manifold;
  int epsilon = 1;
  std::optional<UserStructureSpec> user;  // set when manifold == "user"
  int probes = 100;
  unsigned long long seed = 1;

  CurveSource curve;
  std::optional<double> from, to;
  int n = 101;

  std::optional<double> tol;  // command default when unset
  double normality_tol = 1e-8;

  std::string theta, alpha;  // synthetic θ(s), α(s) profile for check-spherical

  std::string out;

  /// Positive tolerances, ε = ±1, n ≥ 2, from < to when both are set, and a complete user
  /// structure when one is selected. Throws ValidationError.
  void validate() const;
  double tolerance(Command c) const;
  std::string manifold_name() const;
};

/// Reads a config document. Unknown keys are a ValidationError.
RunConfig load_config(const config::Document& doc);
RunConfig load_config_file(const std::string& path);

/// The structure named by the config (built-in or user-defined).
StructureTensors make_manifold(const RunConfig& cfg);
/// The curve named by the config and its default grid interval.
Curve make_curve(const RunConfig& cfg);
std::vector<double> make_grid(const RunConfig& cfg, const Curve& curve);

/// Everything a subcommand produces. `primary` goes to --out (or stdout); `secondary` files are
/// written next to it; `summary` is the JSON digest printed on stdout when --out is set.
struct CommandResult {
  int exit_code = kSuccess;
  std::string primary;
  std::string summary;
  std::map<std::string, std::string> secondary;  // suffix → content
  std::vector<std::string> messages;              // human-readable notices for stderr
};

CommandResult verify_manifold(const RunConfig& cfg);
CommandResult analyze_curve(const RunConfig& cfg);
CommandResult gen_legendre(const RunConfig& cfg);
CommandResult check_spherical(const RunConfig& cfg);
CommandResult plot(const RunConfig& cfg);

/// Dispatches and converts library errors into exit codes: ValidationError → 1, any
/// HypothesisError or DomainError → 2. The error text lands in `messages`.
CommandResult run(Command c, const RunConfig& cfg);

/// Locale-independent shortest round-trip formatting used in CSV output.
std::string format_number(double v);

}  // namespace acpm::cli
