#pragma once

#include <Eigen/Core>

#include "klmap/forward.hpp"
#include "klmap/grid.hpp"
#include "klmap/kernel.hpp"
#include "klmap/kl_basis.hpp"

namespace klmap {

/// One inverse problem: prior (kernel + eigensystem), forward map, noise
/// model and data, all living on a single grid. Immutable once built.
struct Problem {
  GridPtr grid;
  Kernel kernel;
  KLBasis basis;
  ForwardModel model;
  NoiseModel noise;
  Dataset data;

  Problem(GridPtr grid, Kernel kernel, KLBasis basis, ForwardModel model,
          NoiseModel noise, Dataset data);
};

/// Phi(u) = sum_j (G(u)_j - y_j)^2 / variances_j. No 1/2 factor.
double potential_phi(const Problem& p, const GridFunction& u);

/// I(u) = Phi(u) + ||u||_E^2; defined on the discrete Cameron-Martin range
/// (propagates NotInRangeError from the E-norm).
double objective_I(const Problem& p, const GridFunction& u);

/// J(x) = Phi(Q^{1/2} x) + ||x||_X^2.
double objective_J(const Problem& p, const GridFunction& x);

/// J_n(xi) = Phi(sum_k xi_k sqrt(lambda_k) e_k) + sum_k xi_k^2, n = xi.size().
/// Throws DimensionError when n exceeds the basis rank.
double objective_J_truncated(const Problem& p, const Eigen::VectorXd& xi);

/// X-Riesz representer g of dJ(x): <g,h>_X equals the directional derivative
/// of J at x along h. Concretely 2 Q^{1/2} riesz(Jac^T C^{-1} r) + 2x, where
/// riesz divides nodal cotangents by the quadrature weights.
GridFunction gradient_J(const Problem& p, const GridFunction& x);

/// Euclidean gradient of J_n; equals <gradient_J(embed(xi)), e_k>_X per entry.
Eigen::VectorXd gradient_J_truncated(const Problem& p, const Eigen::VectorXd& xi);

/// Embed coefficients as sum_k xi_k e_k (an X-isometry onto the retained span).
GridFunction embed_coefficients(const Problem& p, const Eigen::VectorXd& xi);

namespace testhook {
/// When set, analytic gradients come out negated. Off by default; exists only
/// so gradient checks and line-search failure paths can be exercised.
extern bool corrupt_gradients;
}  // namespace testhook

}  // namespace klmap
