#include "klmap/objective.hpp"

#include <string>
#include <utility>

#include "klmap/errors.hpp"

namespace klmap {

namespace testhook {
bool corrupt_gradients = false;
}

Problem::Problem(GridPtr grid_in, Kernel kernel_in, KLBasis basis_in, ForwardModel model_in,
                 NoiseModel noise_in, Dataset data_in)
    : grid(std::move(grid_in)),
      kernel(std::move(kernel_in)),
      basis(std::move(basis_in)),
      model(std::move(model_in)),
      noise(std::move(noise_in)),
      data(std::move(data_in)) {
  kernel.validate();
  noise.validate();
  model.validate(*grid);
  if (!same_grid(basis.grid(), grid)) {
    throw GridMismatchError("Problem: basis grid differs from problem grid");
  }
  if (data.truth && !same_grid(data.truth->grid(), grid)) {
    throw GridMismatchError("Problem: truth grid differs from problem grid");
  }
  if (noise.dim() != model.dim() || data.y.size() != model.dim()) {
    throw DimensionError("Problem: forward dimension " + std::to_string(model.dim()) +
                         ", noise dimension " + std::to_string(noise.dim()) +
                         ", data dimension " + std::to_string(data.y.size()));
  }
}

double potential_phi(const Problem& p, const GridFunction& u) {
  if (!same_grid(u.grid(), p.grid)) {
    throw GridMismatchError("potential_phi: function grid differs from problem grid");
  }
  if (p.model.dim() == 0) return 0.0;
  const Eigen::VectorXd r = forward_apply(p.model, u) - p.data.y;
  return r.cwiseAbs2().cwiseQuotient(p.noise.variances).sum();
}

double objective_I(const Problem& p, const GridFunction& u) {
  return potential_phi(p, u) + norm_E_squared(p.basis, u);
}

double objective_J(const Problem& p, const GridFunction& x) {
  return potential_phi(p, apply_sqrtQ(p.basis, x)) + inner_product_X(x, x);
}

GridFunction embed_coefficients(const Problem& p, const Eigen::VectorXd& xi) {
  if (xi.size() > p.basis.rank()) {
    throw DimensionError("truncation dimension " + std::to_string(xi.size()) +
                         " exceeds basis rank " + std::to_string(p.basis.rank()));
  }
  return p.basis.expand(xi);
}

double objective_J_truncated(const Problem& p, const Eigen::VectorXd& xi) {
  if (xi.size() > p.basis.rank()) {
    throw DimensionError("truncation dimension " + std::to_string(xi.size()) +
                         " exceeds basis rank " + std::to_string(p.basis.rank()));
  }
  const Eigen::VectorXd scaled =
      p.basis.eigenvalues().head(xi.size()).cwiseSqrt().cwiseProduct(xi);
  const GridFunction u = p.basis.expand(scaled);
  return potential_phi(p, u) + xi.squaredNorm();
}

namespace {

/// Nodal cotangent of Phi at u: 2 Jac^T C^{-1} (G(u) - y). Zero when d = 0.
Eigen::VectorXd phi_cotangent(const Problem& p, const GridFunction& u) {
  if (p.model.dim() == 0) return Eigen::VectorXd::Zero(u.size());
  const Eigen::VectorXd r = forward_apply(p.model, u) - p.data.y;
  const Eigen::MatrixXd jac = forward_jacobian(p.model, u);
  return 2.0 * (jac.transpose() * r.cwiseQuotient(p.noise.variances));
}

}  // namespace

GridFunction gradient_J(const Problem& p, const GridFunction& x) {
  if (!same_grid(x.grid(), p.grid)) {
    throw GridMismatchError("gradient_J: function grid differs from problem grid");
  }
  const GridFunction u = apply_sqrtQ(p.basis, x);
  const Eigen::VectorXd riesz = phi_cotangent(p, u).cwiseQuotient(p.grid->weights);
  const GridFunction phi_part = apply_sqrtQ(p.basis, GridFunction(p.grid, riesz));
  Eigen::VectorXd g = phi_part.values() + 2.0 * x.values();
  if (testhook::corrupt_gradients) g = -g;
  return GridFunction(p.grid, std::move(g));
}

Eigen::VectorXd gradient_J_truncated(const Problem& p, const Eigen::VectorXd& xi) {
  const int n = static_cast<int>(xi.size());
  if (n > p.basis.rank()) {
    throw DimensionError("truncation dimension " + std::to_string(n) +
                         " exceeds basis rank " + std::to_string(p.basis.rank()));
  }
  const Eigen::VectorXd sqrt_lambda = p.basis.eigenvalues().head(n).cwiseSqrt();
  const GridFunction u = p.basis.expand(sqrt_lambda.cwiseProduct(xi));
  // d/dxi_k Phi = sqrt(lambda_k) e_k . cotangent (plain nodal sum).
  const Eigen::VectorXd ct = phi_cotangent(p, u);
  Eigen::VectorXd g = sqrt_lambda.cwiseProduct(
                          p.basis.eigenfunctions().leftCols(n).transpose() * ct) +
                      2.0 * xi;
  if (testhook::corrupt_gradients) g = -g;
  return g;
}

}  // namespace klmap
