#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "klmap/objective.hpp"

namespace klmap {

struct SolverConfig {
  double grad_tol = 1e-8;        // stop when the gradient X-norm falls below
  int max_iters = 5000;
  double armijo_c = 1e-4;        // sufficient-decrease constant
  double backtrack_factor = 0.5;
  double init_step = 1.0;        // every line search starts here

  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;  // accepted step producing this iterate (0 for the start row)
};

/// Minimizer record. Coefficients are K-L coordinates of x; u = Q^{1/2} x.
struct Solution {
  Eigen::VectorXd coefficients;
  GridFunction x;
  GridFunction u;
  double objective_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;
};

/// Minimize J over X. The discrete X splits into the retained eigenspan plus
/// a complement where J is plain ||.||^2_X minimized at zero, so descent runs
/// in K-L coordinates over the full retained span; a nonzero init is projected
/// onto that span. Throws LineSearchError when backtracking underflows;
/// non-convergence within max_iters is reported via converged = false.
Solution solve_full(const Problem& p, const SolverConfig& cfg,
                    const std::optional<GridFunction>& init = std::nullopt);

/// Minimize J_n over R^n for n <= rank. Solution.x = sum xi_k e_k and
/// Solution.u = sum xi_k sqrt(lambda_k) e_k.
Solution solve_truncated(const Problem& p, int n, const SolverConfig& cfg,
                         const std::optional<Eigen::VectorXd>& init = std::nullopt);

/// x_n = sum_{k<=n} <x,e_k>_X e_k. Idempotent; n = 0 gives the zero function.
GridFunction project_to_Xn(const KLBasis& basis, const GridFunction& x, int n);

}  // namespace klmap
