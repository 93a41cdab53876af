#include "klmap/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "klmap/bounds.hpp"
#include "klmap/errors.hpp"
#include "klmap/experiment.hpp"
#include "klmap/io.hpp"
#include "klmap/rng.hpp"
#include "klmap/svg.hpp"

namespace klmap::cli {

namespace {

namespace fs = std::filesystem;

struct LoadedRun {
  Experiment experiment;
  fs::path out_dir;
};

LoadedRun load_run(const CommandOptions& opts) {
  const fs::path config_path(opts.config_path);
  ExperimentConfig config = parse_config_file(config_path);
  const fs::path base_dir =
      config_path.has_parent_path() ? config_path.parent_path() : fs::path(".");
  Experiment experiment = build_experiment(config, base_dir);
  fs::path out_dir = resolve_output_dir(opts, experiment.effective.output.directory);
  return LoadedRun{std::move(experiment), std::move(out_dir)};
}

void echo_effective_config(const LoadedRun& run) {
  atomic_write_file(run.out_dir / "effective_config.ini",
                    serialize_config(run.experiment.effective));
}

void write_dataset_files(const LoadedRun& run) {
  const Problem& p = run.experiment.problem;
  atomic_write_file(run.out_dir / "dataset.csv", dataset_csv(p.model, p.data));
  if (p.data.truth) {
    atomic_write_file(run.out_dir / "truth.csv", nodal_csv(*p.data.truth, "truth"));
  }
}

/// Maps exceptions from a command body onto the exit-code contract.
template <typename Fn>
int guarded(Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& ex) {
    // includes DimensionError / GridMismatchError / OutOfDomainError
    std::cerr << "config error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const std::exception& ex) {
    std::cerr << "numerical error: " << ex.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace

fs::path resolve_output_dir(const CommandOptions& opts, const std::string& config_directory) {
  if (opts.out_override) return fs::path(*opts.out_override);
  if (const char* env = std::getenv("KLMAP_OUTPUT_DIR"); env && *env) {
    return fs::path(env);
  }
  return fs::path(config_directory);
}

int cmd_kl_eigs(const CommandOptions& opts) {
  return guarded([&] {
    const LoadedRun run = load_run(opts);
    const KLBasis& basis = run.experiment.problem.basis;
    atomic_write_file(run.out_dir / "eigenvalues.csv", eigenvalues_csv(basis));
    atomic_write_file(run.out_dir / "eigenfunctions.csv", eigenfunctions_csv(basis));
    echo_effective_config(run);
    std::cout << "kl-eigs: rank " << basis.rank() << " of " << basis.grid()->size()
              << " modes retained; lambda_1 = " << format_double(basis.eigenvalues()[0])
              << '\n';
    return kOk;
  });
}

int cmd_solve(const CommandOptions& opts) {
  return guarded([&] {
    const LoadedRun run = load_run(opts);
    const Problem& p = run.experiment.problem;
    if (opts.truncation_n && (*opts.truncation_n < 1 || *opts.truncation_n > p.basis.rank())) {
      std::cerr << "config error: --n " << *opts.truncation_n << " outside [1, "
                << p.basis.rank() << "]\n";
      return static_cast<int>(kConfigError);
    }

    const SolverConfig& solver = run.experiment.effective.solver;
    const Solution sol = opts.truncation_n
                             ? solve_truncated(p, *opts.truncation_n, solver)
                             : solve_full(p, solver);

    atomic_write_file(run.out_dir / "solution.csv", solution_coefficients_csv(sol));
    atomic_write_file(run.out_dir / "solution_nodal.csv", solution_nodal_csv(sol));
    atomic_write_file(run.out_dir / "trace.csv", trace_csv(sol.trace));
    write_dataset_files(run);
    echo_effective_config(run);

    std::cout << "solve: " << (sol.converged ? "converged" : "NOT converged") << " in "
              << sol.iterations << " iterations, J = " << format_double(sol.objective_value)
              << ", grad norm = " << format_double(sol.grad_norm) << '\n';
    return sol.converged ? static_cast<int>(kOk) : static_cast<int>(kNotConverged);
  });
}

int cmd_verify(const CommandOptions& opts) {
  return guarded([&] {
    const LoadedRun run = load_run(opts);
    const Problem& p = run.experiment.problem;
    const ExperimentConfig& cfg = run.experiment.effective;
    if (!cfg.sweep.present) {
      std::cerr << "config error: verify requires a [sweep] section with ns\n";
      return static_cast<int>(kConfigError);
    }
    for (int n : cfg.sweep.ns) {
      if (n > p.basis.rank()) {
        std::cerr << "config error: sweep n = " << n << " exceeds basis rank "
                  << p.basis.rank() << '\n';
        return static_cast<int>(kConfigError);
      }
    }

    LipschitzEstimate estimate;
    const std::vector<BoundReport> reports =
        run_sweep(p, cfg.sweep.ns, cfg.solver, cfg.sweep.seed, cfg.sweep.lipschitz_samples,
                  &estimate);
    std::cout << "Lipschitz constant: sampled L_hat = " << format_double(estimate.L_hat)
              << ", bounds use "
              << (estimate.exact ? "the closed-form linear-case constant "
                                 : "1.25 * L_hat = ")
              << format_double(estimate.working) << '\n';

    atomic_write_file(run.out_dir / "bounds.csv", bound_reports_csv(reports));
    if (cfg.output.emit_svg) {
      atomic_write_file(run.out_dir / "bounds.svg", bounds_convergence_svg(reports));
    }
    write_dataset_files(run);
    echo_effective_config(run);

    bool all_ok = true;
    for (const BoundReport& r : reports) {
      const bool ok = r.thm1_ok && r.cor1_ok && r.cor2_ok;
      all_ok = all_ok && ok;
      std::cout << "n = " << r.n << ": thm1 " << (r.thm1_ok ? "ok" : "FAIL") << ", cor1 "
                << (r.cor1_ok ? "ok" : "FAIL") << ", cor2 " << (r.cor2_ok ? "ok" : "FAIL");
      if (r.local_minimizer_only) {
        std::cout << " (local minimizer: nonlinear forward model)";
      }
      if (!r.note.empty()) std::cout << " [" << r.note << "]";
      std::cout << '\n';
    }
    return all_ok ? static_cast<int>(kOk) : static_cast<int>(kBoundViolation);
  });
}

int cmd_gradcheck(const CommandOptions& opts) {
  return guarded([&] {
    const LoadedRun run = load_run(opts);
    const Problem& p = run.experiment.problem;
    const int rank = p.basis.rank();
    const int n_trunc = std::min(8, rank);
    constexpr double kDelta = 1e-5;
    constexpr double kTol = 1e-4;
    constexpr std::uint64_t kSeed = 17;

#ifndef NDEBUG
    testhook::corrupt_gradients = opts.corrupt_gradient;
#endif

    double max_err = 0.0;
    for (int point = 0; point < 5; ++point) {
      // seeded point in the retained span, unit X-norm
      Eigen::VectorXd c(rank);
      const std::uint64_t base =
          static_cast<std::uint64_t>(point) * static_cast<std::uint64_t>(2 * p.grid->size());
      for (int k = 0; k < rank; ++k) {
        c[k] = rng_normal(kSeed, RngStream::gradcheck_points, base + k);
      }
      if (c.norm() > 0) c /= c.norm();
      const GridFunction x = p.basis.expand(c);
      const GridFunction g = gradient_J(p, x);

      for (int dir = 0; dir < 5; ++dir) {
        Eigen::VectorXd v(rank);
        const std::uint64_t dbase =
            base + static_cast<std::uint64_t>(p.grid->size()) + 37 * (dir + 1);
        for (int k = 0; k < rank; ++k) {
          v[k] = rng_normal(kSeed, RngStream::gradcheck_directions, dbase + k);
        }
        if (v.norm() == 0) continue;
        v /= v.norm();
        const GridFunction h = p.basis.expand(v);
        const double analytic = inner_product_X(g, h);
        const double fd = (objective_J(p, x + kDelta * h) - objective_J(p, x - kDelta * h)) /
                          (2.0 * kDelta);
        max_err = std::max(max_err, std::abs(analytic - fd) / (1.0 + std::abs(analytic)));
      }

      // truncated objective: per-coordinate central differences
      Eigen::VectorXd xi = c.head(n_trunc);
      const Eigen::VectorXd gt = gradient_J_truncated(p, xi);
      for (int k = 0; k < n_trunc; ++k) {
        Eigen::VectorXd lo = xi, hi = xi;
        lo[k] -= kDelta;
        hi[k] += kDelta;
        const double fd =
            (objective_J_truncated(p, hi) - objective_J_truncated(p, lo)) / (2.0 * kDelta);
        max_err = std::max(max_err, std::abs(gt[k] - fd) / (1.0 + std::abs(gt[k])));
      }
    }

#ifndef NDEBUG
    testhook::corrupt_gradients = false;
#endif

    echo_effective_config(run);
    std::cout << "gradcheck: max relative error " << format_double(max_err)
              << (max_err <= kTol ? " (ok)" : " (FAIL)") << '\n';
    return max_err <= kTol ? static_cast<int>(kOk) : static_cast<int>(kNumericalError);
  });
}

}  // namespace klmap::cli
