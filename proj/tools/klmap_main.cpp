#include <CLI11.hpp>
#include <string>

#include "klmap/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Karhunen-Loeve MAP estimation for Bayesian inverse problems on an interval"};
  app.require_subcommand(1);

  klmap::cli::CommandOptions opts;
  std::string config_path;
  std::string out_dir;
  int truncation_n = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides KLMAP_OUTPUT_DIR and config)");
  };

  CLI::App* kl_eigs = app.add_subcommand(
      "kl-eigs", "decompose the prior covariance; write eigenvalues and eigenfunctions");
  add_common(kl_eigs);

  CLI::App* solve =
      app.add_subcommand("solve", "minimize the whitened objective (full or truncated)");
  add_common(solve);
  CLI::Option* n_opt =
      solve->add_option("--n", truncation_n, "truncation dimension (omit for full solve)")
          ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand(
      "verify", "sweep truncation dimensions and check the error bounds");
  add_common(verify);

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference validation of the objective gradients");
  add_common(gradcheck);
#ifndef NDEBUG
  gradcheck->add_flag("--corrupt-gradient", opts.corrupt_gradient,
                      "negate analytic gradients (negative control)");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // Map usage problems onto the config-error exit code; --help stays 0.
    return code == 0 ? 0 : klmap::cli::kConfigError;
  }

  opts.config_path = config_path;
  if (!out_dir.empty()) opts.out_override = out_dir;
  if (n_opt->count() > 0) opts.truncation_n = truncation_n;

  if (kl_eigs->parsed()) return klmap::cli::cmd_kl_eigs(opts);
  if (solve->parsed()) return klmap::cli::cmd_solve(opts);
  if (verify->parsed()) return klmap::cli::cmd_verify(opts);
  if (gradcheck->parsed()) return klmap::cli::cmd_gradcheck(opts);
  return klmap::cli::kConfigError;
}
