// Command-line front end: verify | tau | classify | orbit.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pseudogroup/cli.hpp"

using namespace pseudogroup;

int main(int argc, char** argv) {
  CLI::App app{"Near-identity pseudogroups of interval maps: verification, translation numbers, classification"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> tol_identity;
  std::optional<int> iters, qmax;
  app.add_option("--config", config_path, "Config JSON (see docs/config-schema.md)")->required();
  app.add_option("--out", out_dir, "Output directory; overrides output_dir");
  app.add_option("--tol-identity", tol_identity, "Identity tolerance for commutator checks");
  app.add_option("--iters", iters, "Iterations for translation numbers");
  app.add_option("--qmax", qmax, "Largest denominator for rational identification");

  auto* verify = app.add_subcommand("verify", "Check nilpotency, abelian and metabelian structure");

  auto* tau = app.add_subcommand("tau", "Relative translation number tau(f_j, f_i, x0)");
  std::string ti, tj;
  double tx0 = 0.0;
  tau->add_option("-i", ti, "Reference generator (name or 1-based index)")->required();
  tau->add_option("-j", tj, "Measured generator (name or 1-based index)")->required();
  tau->add_option("--x0", tx0, "Base point");

  auto* cls = app.add_subcommand("classify", "Decide the case of the classification");
  std::optional<double> cx0;
  cls->add_option("--x0", cx0, "Base point when there is no common fixed point");

  auto* orbit = app.add_subcommand("orbit", "Iterate a word and write the orbit as CSV");
  std::string word;
  double ox0 = 0.0;
  int on = 100;
  orbit->add_option("--word", word, "Word such as \"f1 f2^-1\"")->required();
  orbit->add_option("--x0", ox0, "Starting point");
  orbit->add_option("-n", on, "Number of steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitError;
  }

  cli::apply_thread_env();
  cli::Config config;
  try {
    config = cli::load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (tol_identity) config.identity_tol = *tol_identity;
    if (iters) config.tau_iterations = *iters;
    if (qmax) config.q_max = *qmax;
    if (cx0) config.x0 = *cx0;
    cli::validate(config);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kExitError;
  }

  if (*verify) return cli::cmd_verify(config, std::cout, std::cerr);
  if (*tau) return cli::cmd_tau(config, ti, tj, tx0, std::cout, std::cerr);
  if (*cls) return cli::cmd_classify(config, std::cout, std::cerr);
  return cli::cmd_orbit(config, word, ox0, on, std::cout, std::cerr);
}
