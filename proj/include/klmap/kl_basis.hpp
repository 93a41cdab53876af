#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "klmap/grid.hpp"
#include "klmap/kernel.hpp"

namespace klmap {

/// Karhunen-Loeve eigensystem of the prior covariance operator on a grid.
///
/// Eigenvalues are sorted descending and clamped at zero; eigenfunctions are
/// orthonormal in the X inner product (not Euclidean). rank() counts the
/// retained modes, lambda_k > drop_tol * lambda_1; operators that divide by
/// eigenvalues act on that retained span only.
class KLBasis {
 public:
  KLBasis(GridPtr grid, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenfunctions,
          int rank);

  const GridPtr& grid() const { return grid_; }
  /// All m eigenvalues, descending, >= 0.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Column k holds the nodal values of e_{k+1}.
  const Eigen::MatrixXd& eigenfunctions() const { return eigenfunctions_; }
  int rank() const { return rank_; }

  GridFunction eigenfunction(int k) const;  // 0-based

  /// lambda*_n = lambda_{n+1} from the sorted spectrum; 0 for n >= rank.
  double lambda_star(int n) const;

  /// K-L coefficients <x, e_k>_X for k < rank.
  Eigen::VectorXd coefficients(const GridFunction& x) const;

  /// sum_k c_k e_k for up to rank coefficients.
  GridFunction expand(const Eigen::VectorXd& coeffs) const;

 private:
  GridPtr grid_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenfunctions_;
  int rank_ = 0;
};

/// Solve the quadrature-weighted (Nystrom/Galerkin) eigenproblem for the
/// kernel's integral operator: form A = W^{1/2} K W^{1/2}, take its symmetric
/// eigendecomposition, and map eigenvectors back by W^{-1/2} so the resulting
/// eigenfunctions are X-orthonormal. Negative roundoff eigenvalues clamp to 0.
/// Throws NumericalError if the eigensolve fails.
KLBasis kl_decompose(const Kernel& kernel, const GridPtr& grid, double drop_tol);

/// Q x = sum_k lambda_k <x,e_k>_X e_k over retained modes.
GridFunction apply_Q(const KLBasis& basis, const GridFunction& x);

/// Q^{1/2} x = sum_k sqrt(lambda_k) <x,e_k>_X e_k over retained modes.
GridFunction apply_sqrtQ(const KLBasis& basis, const GridFunction& x);

/// Q^{-1/2} u over the retained span. Throws NotInRangeError when u has a
/// residual outside the span larger than 1e-6 * ||u||_X.
GridFunction apply_invsqrtQ(const KLBasis& basis, const GridFunction& u);

/// Cameron-Martin norm squared: sum_k <u,e_k>_X^2 / lambda_k.
/// Same range precondition as apply_invsqrtQ.
double norm_E_squared(const KLBasis& basis, const GridFunction& u);

/// Gaussian prior draw sum_k sqrt(lambda_k) xi_k e_k with deterministic
/// counter-based normals; identical output for identical seeds.
GridFunction sample_prior(const KLBasis& basis, std::uint64_t seed);

}  // namespace klmap
