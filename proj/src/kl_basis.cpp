#include "klmap/kl_basis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "klmap/errors.hpp"
#include "klmap/rng.hpp"

namespace klmap {

KLBasis::KLBasis(GridPtr grid, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenfunctions,
                 int rank)
    : grid_(std::move(grid)),
      eigenvalues_(std::move(eigenvalues)),
      eigenfunctions_(std::move(eigenfunctions)),
      rank_(rank) {
  const int m = grid_->size();
  if (eigenvalues_.size() != m || eigenfunctions_.rows() != m ||
      eigenfunctions_.cols() != m) {
    throw DimensionError("KLBasis: eigensystem size does not match grid");
  }
  if (rank_ < 0 || rank_ > m) {
    throw DimensionError("KLBasis: rank " + std::to_string(rank_) + " out of [0, " +
                         std::to_string(m) + "]");
  }
}

GridFunction KLBasis::eigenfunction(int k) const {
  if (k < 0 || k >= eigenfunctions_.cols()) {
    throw DimensionError("eigenfunction index " + std::to_string(k) + " out of range");
  }
  return GridFunction(grid_, eigenfunctions_.col(k));
}

double KLBasis::lambda_star(int n) const {
  if (n < 0) throw DimensionError("lambda_star: negative n");
  return n < rank_ ? eigenvalues_[n] : 0.0;
}

Eigen::VectorXd KLBasis::coefficients(const GridFunction& x) const {
  if (!same_grid(x.grid(), grid_)) {
    throw GridMismatchError("coefficients: function grid differs from basis grid");
  }
  const Eigen::VectorXd wx = grid_->weights.cwiseProduct(x.values());
  return eigenfunctions_.leftCols(rank_).transpose() * wx;
}

GridFunction KLBasis::expand(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() > rank_) {
    throw DimensionError("expand: " + std::to_string(coeffs.size()) +
                         " coefficients exceed rank " + std::to_string(rank_));
  }
  return GridFunction(grid_, eigenfunctions_.leftCols(coeffs.size()) * coeffs);
}

KLBasis kl_decompose(const Kernel& kernel, const GridPtr& grid, double drop_tol) {
  if (drop_tol < 0.0) {
    throw std::invalid_argument("kl_decompose: drop_tol must be nonnegative");
  }
  const int m = grid->size();
  const Eigen::MatrixXd K = kernel_matrix(kernel, *grid);
  const Eigen::VectorXd sqw = grid->weights.cwiseSqrt();

  Eigen::MatrixXd A = sqw.asDiagonal() * K * sqw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("kl_decompose: symmetric eigensolve did not converge");
  }

  // Eigen returns ascending order; flip to descending and clamp roundoff
  // negatives (Q is positive semidefinite by assumption).
  Eigen::VectorXd lambda(m);
  Eigen::MatrixXd funcs(m, m);
  const Eigen::VectorXd inv_sqw = sqw.cwiseInverse();
  for (int k = 0; k < m; ++k) {
    const int src = m - 1 - k;
    lambda[k] = std::max(solver.eigenvalues()[src], 0.0);
    funcs.col(k) = inv_sqw.cwiseProduct(solver.eigenvectors().col(src));
  }

  int rank = 0;
  const double cutoff = drop_tol * (lambda.size() > 0 ? lambda[0] : 0.0);
  while (rank < m && lambda[rank] > cutoff) ++rank;

  return KLBasis(grid, std::move(lambda), std::move(funcs), rank);
}

namespace {

Eigen::VectorXd range_coefficients(const KLBasis& basis, const GridFunction& u,
                                   const char* op) {
  const Eigen::VectorXd c = basis.coefficients(u);
  const GridFunction projection = basis.expand(c);
  const double residual = norm_X(u - projection);
  if (residual > 1e-6 * norm_X(u)) {
    throw NotInRangeError(std::string(op) +
                          ": function outside the retained eigenspan (residual " +
                          std::to_string(residual) + ")");
  }
  return c;
}

}  // namespace

GridFunction apply_Q(const KLBasis& basis, const GridFunction& x) {
  const Eigen::VectorXd c = basis.coefficients(x);
  return basis.expand(basis.eigenvalues().head(basis.rank()).cwiseProduct(c));
}

GridFunction apply_sqrtQ(const KLBasis& basis, const GridFunction& x) {
  const Eigen::VectorXd c = basis.coefficients(x);
  return basis.expand(
      basis.eigenvalues().head(basis.rank()).cwiseSqrt().cwiseProduct(c));
}

GridFunction apply_invsqrtQ(const KLBasis& basis, const GridFunction& u) {
  const Eigen::VectorXd c = range_coefficients(basis, u, "apply_invsqrtQ");
  const Eigen::VectorXd scaled =
      c.cwiseQuotient(basis.eigenvalues().head(basis.rank()).cwiseSqrt());
  return basis.expand(scaled);
}

double norm_E_squared(const KLBasis& basis, const GridFunction& u) {
  const Eigen::VectorXd c = range_coefficients(basis, u, "norm_E_squared");
  return c.cwiseAbs2().cwiseQuotient(basis.eigenvalues().head(basis.rank())).sum();
}

GridFunction sample_prior(const KLBasis& basis, std::uint64_t seed) {
  Eigen::VectorXd coeffs(basis.rank());
  for (int k = 0; k < basis.rank(); ++k) {
    coeffs[k] = std::sqrt(basis.eigenvalues()[k]) *
                rng_normal(seed, RngStream::prior_sample, static_cast<std::uint64_t>(k));
  }
  return basis.expand(coeffs);
}

}  // namespace klmap
