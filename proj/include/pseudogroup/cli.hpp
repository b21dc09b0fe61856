#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pseudogroup/classify.hpp"
#include "pseudogroup/errors.hpp"
#include "pseudogroup/nilpotency.hpp"
#include "pseudogroup/pmap.hpp"
#include "pseudogroup/rotation.hpp"

namespace pseudogroup::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,       // I/O, config or numeric error
  kExitHypothesis = 2,  // hypothesis or precondition failure
  kExitAmbiguous = 3,   // classification could not separate two cases
};

/// Malformed or invalid configuration. `where` is "line L, column C" for
/// syntax errors and a field path (plus line, when it can be located) otherwise.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& message)
      : Error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Run configuration; see docs/config-schema.md.
struct Config {
  std::vector<std::pair<std::string, std::string>> generators;  // (name, expression)
  int claimed_order = 1;

  double identity_tol = kDefaultIdentityTol;
  double inversion_tol = kDefaultInversionTol;
  double fixed_point_tol = kDefaultFixedTol;
  double commutator_tol = 1e-8;
  double chain_tol = kDefaultChainTol;

  int tau_iterations = kDefaultIterations;
  int identity_samples = kDefaultIdentitySamples;
  int c1_samples = kDefaultC1Samples;
  int fixed_point_grid = kDefaultFixedGrid;
  int segments = kDefaultSegments;
  int residual_samples = kDefaultResidualSamples;

  int q_max = kDefaultQMax;
  std::optional<double> x0;
  std::string output_dir = "runs";

  std::string text;  // source JSON, kept for line numbers in diagnostics
};

/// Parses config JSON. `source` names the text in diagnostics.
Config parse_config(const std::string& text, const std::string& source = "config");
Config load_config(const std::filesystem::path& path);

/// Throws ConfigError on a violated invariant (no generators, m < 1,
/// non-positive tolerance, duplicate names, ...).
void validate(const Config& c);

/// Canonical JSON form: every analysis field in a fixed key order. The
/// output directory is left out so moving runs does not change the hash.
std::string canonical_json(const Config& c);
/// FNV-1a (64 bit) of canonical_json, as 16 hex digits.
std::string config_hash(const Config& c);
/// <output_dir>/run-<hash>
std::filesystem::path run_directory(const Config& c);

/// Builds the generator set; expression errors become ConfigError naming the
/// generator and the offset inside its expression.
GeneratorSet build_generators(const Config& c);

ClassifyOptions classify_options(const Config& c);

/// Subcommands. Each writes its artifacts under run_directory(c), prints a
/// short summary to `out`, diagnostics to `err`, and returns an ExitCode.
int cmd_verify(const Config& c, std::ostream& out, std::ostream& err);
int cmd_tau(const Config& c, const std::string& i, const std::string& j, double x0,
            std::ostream& out, std::ostream& err);
int cmd_classify(const Config& c, std::ostream& out, std::ostream& err);
int cmd_orbit(const Config& c, const std::string& word, double x0, int n, std::ostream& out,
              std::ostream& err);

/// "0.2500 ± 0.0001 (rational 1/4)"
std::string format_tau(const RotationEstimate& e, int q_max);

/// Applies PSEUDOGROUP_THREADS when set to a positive integer.
void apply_thread_env();

}  // namespace pseudogroup::cli
