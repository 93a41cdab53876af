#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "klmap/errors.hpp"
#include "klmap/kl_basis.hpp"
#include "test_helpers.hpp"

using namespace klmap;

namespace {

/// Brownian-motion covariance eigenvalues on [0,1]: ((k - 1/2) pi)^{-2}.
double brownian_eigenvalue(int k) {
  const double f = (static_cast<double>(k) - 0.5) * std::numbers::pi;
  return 1.0 / (f * f);
}

/// Independent spectral oracle: eigenvalues of the Nystrom matrix K W via the
/// general (non-symmetric) eigensolver, a different algorithmic route than
/// the symmetrized decomposition under test.
Eigen::VectorXd nystrom_spectrum_oracle(const Kernel& kernel, const Grid& grid) {
  const Eigen::MatrixXd KW =
      kernel_matrix(kernel, grid) * grid.weights.asDiagonal();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(KW, /*computeEigenvectors=*/false);
  REQUIRE(solver.info() == Eigen::Success);
  Eigen::VectorXd real_parts = solver.eigenvalues().real();
  std::sort(real_parts.data(), real_parts.data() + real_parts.size(),
            std::greater<double>());
  return real_parts;
}

std::vector<Kernel> test_kernels() {
  return {Kernel{KernelFamily::brownian, 1.0, 1.0},
          Kernel{KernelFamily::exponential, 0.8, 0.3},
          Kernel{KernelFamily::squared_exponential, 1.5, 0.15}};
}

}  // namespace

TEST_SUITE("prior") {

TEST_CASE("brownian spectrum matches the closed form and the Nystrom oracle") {
  const GridPtr grid = build_grid(0.0, 1.0, 513);
  const Kernel kernel{KernelFamily::brownian, 1.0, 1.0};
  const KLBasis basis = kl_decompose(kernel, grid, 0.0);

  CHECK(basis.eigenvalues()[0] == doctest::Approx(0.405285).epsilon(1e-3));
  CHECK(basis.eigenvalues()[1] == doctest::Approx(0.045032).epsilon(1e-3));
  for (int k = 1; k <= 5; ++k) {
    CHECK(basis.eigenvalues()[k - 1] ==
          doctest::Approx(brownian_eigenvalue(k)).epsilon(1e-3));
  }

  const Eigen::VectorXd oracle = nystrom_spectrum_oracle(kernel, *grid);
  for (int k = 0; k < 8; ++k) {
    CHECK(basis.eigenvalues()[k] == doctest::Approx(oracle[k]).epsilon(1e-9));
  }

  // discrete trace == quadrature of the diagonal; for Brownian that is
  // the trapezoid sum of t, exactly 1/2
  const double trace = basis.eigenvalues().sum();
  const double diag_quadrature = grid->weights.dot(grid->nodes);
  CHECK(std::abs(trace - diag_quadrature) <= 1e-10 * std::abs(diag_quadrature));
  CHECK(std::abs(trace - 0.5) <= 1e-3);
}

TEST_CASE("trace identity, orthonormality and residuals for all families") {
  for (const Kernel& kernel : test_kernels()) {
    for (int m : {65, 257}) {
      CAPTURE(to_string(kernel.family));
      CAPTURE(m);
      const GridPtr grid = build_grid(0.0, 1.0, m);
      const KLBasis basis = kl_decompose(kernel, grid, 0.0);

      double diag = 0.0;
      for (int i = 0; i < m; ++i) {
        diag += grid->weights[i] * kernel_value(kernel, grid->nodes[i], grid->nodes[i]);
      }
      CHECK(std::abs(basis.eigenvalues().sum() - diag) <= 1e-10 * std::abs(diag));

      // X-orthonormality of retained eigenfunctions
      const int r = basis.rank();
      const Eigen::MatrixXd E = basis.eigenfunctions().leftCols(r);
      const Eigen::MatrixXd gram = E.transpose() * grid->weights.asDiagonal() * E;
      const double ortho_err =
          (gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
      CHECK(ortho_err <= 1e-8);

      // eigen-residual in the operator sense: K W e_k = lambda_k e_k
      const Eigen::MatrixXd KW = kernel_matrix(kernel, *grid) * grid->weights.asDiagonal();
      const double scale = std::max(basis.eigenvalues()[0], 1.0);
      for (int k : {0, 1, r / 2, r - 1}) {
        const Eigen::VectorXd resid =
            KW * E.col(k) - basis.eigenvalues()[k] * E.col(k);
        const double resid_norm = std::sqrt(grid->weights.dot(resid.cwiseAbs2()));
        CHECK(resid_norm <= 1e-8 * scale);
        // and through the spectral application path
        const GridFunction ek = basis.eigenfunction(k);
        CHECK(norm_X(apply_Q(basis, ek) - basis.eigenvalues()[k] * ek) <= 1e-8 * scale);
      }

      // monotone spectrum and lambda* semantics
      for (int k = 1; k < m; ++k) {
        CHECK(basis.eigenvalues()[k] <= basis.eigenvalues()[k - 1]);
      }
      for (int n : {0, 1, r - 1}) {
        CHECK(basis.lambda_star(n) == basis.eigenvalues().segment(n, m - n).maxCoeff());
      }
      CHECK(basis.lambda_star(r) == 0.0);
    }
  }
}

TEST_CASE("apply_Q acts as the eigen-expansion of the kernel operator") {
  const GridPtr grid = build_grid(0.0, 1.0, 65);
  const Kernel kernel{KernelFamily::exponential, 0.8, 0.3};
  const KLBasis basis = kl_decompose(kernel, grid, 0.0);

  SUBCASE("eigenfunction in, scaled eigenfunction out") {
    const GridFunction e1 = basis.eigenfunction(0);
    const GridFunction qe1 = apply_Q(basis, e1);
    CHECK(norm_X(qe1 - basis.eigenvalues()[0] * e1) <= 1e-8);

    const GridFunction zero = GridFunction::zero(grid);
    CHECK(norm_X(apply_Q(basis, zero)) == 0.0);

    const GridFunction sum = e1 + basis.eigenfunction(1);
    const GridFunction expected = basis.eigenvalues()[0] * e1 +
                                  basis.eigenvalues()[1] * basis.eigenfunction(1);
    CHECK(norm_X(apply_Q(basis, sum) - expected) <= 1e-8);
  }

  SUBCASE("matches direct weighted kernel application for random functions") {
    const Eigen::MatrixXd KW = kernel_matrix(kernel, *grid) * grid->weights.asDiagonal();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const GridFunction x = klmap::testing::random_function(grid, seed);
      const GridFunction via_basis = apply_Q(basis, x);
      const GridFunction direct(grid, KW * x.values());
      CHECK(norm_X(via_basis - direct) <= 1e-7 * norm_X(direct));
    }
  }
}

TEST_CASE("apply_sqrtQ is a square root of apply_Q on the retained span") {
  const GridPtr grid = build_grid(0.0, 1.0, 65);
  const Kernel kernel{KernelFamily::brownian, 1.0, 1.0};
  const KLBasis basis = kl_decompose(kernel, grid, 1e-12);

  const GridFunction e1 = basis.eigenfunction(0);
  CHECK(norm_X(apply_sqrtQ(basis, e1) - std::sqrt(basis.eigenvalues()[0]) * e1) <= 1e-8);
  CHECK(norm_X(apply_sqrtQ(basis, GridFunction::zero(grid))) == 0.0);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction x =
        basis.expand(klmap::testing::random_coefficients(basis.rank(), seed));
    const GridFunction twice = apply_sqrtQ(basis, apply_sqrtQ(basis, x));
    CHECK(norm_X(twice - apply_Q(basis, x)) <= 1e-8);
  }
}

TEST_CASE("apply_invsqrtQ inverts apply_sqrtQ on the retained span") {
  const GridPtr grid = build_grid(0.0, 1.0, 65);
  const Kernel kernel{KernelFamily::brownian, 1.0, 1.0};
  const KLBasis basis = kl_decompose(kernel, grid, 1e-12);

  const GridFunction e1 = basis.eigenfunction(0);
  const double inv_sqrt_l1 = 1.0 / std::sqrt(basis.eigenvalues()[0]);
  CHECK(norm_X(apply_invsqrtQ(basis, e1) - inv_sqrt_l1 * e1) <= 1e-8);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction x =
        basis.expand(klmap::testing::random_coefficients(basis.rank(), seed));
    const GridFunction roundtrip = apply_invsqrtQ(basis, apply_sqrtQ(basis, x));
    CHECK(norm_X(roundtrip - x) <= 1e-8 * norm_X(x));
  }
}

TEST_CASE("functions on dropped modes are outside the Cameron-Martin range") {
  const GridPtr grid = build_grid(0.0, 1.0, 33);
  const Kernel kernel{KernelFamily::brownian, 1.0, 1.0};
  // brownian lambda_2 / lambda_1 = 1/9, so drop_tol = 0.5 keeps one mode
  const KLBasis basis = kl_decompose(kernel, grid, 0.5);
  REQUIRE(basis.rank() == 1);

  const GridFunction dropped = basis.eigenfunction(1);
  CHECK_THROWS_AS(apply_invsqrtQ(basis, dropped), NotInRangeError);
  CHECK_THROWS_AS(norm_E_squared(basis, dropped), NotInRangeError);
}

TEST_CASE("Cameron-Martin norm") {
  const GridPtr grid = build_grid(0.0, 1.0, 65);
  const Kernel kernel{KernelFamily::exponential, 0.8, 0.3};
  const KLBasis basis = kl_decompose(kernel, grid, 1e-12);

  const GridFunction scaled_e1 =
      std::sqrt(basis.eigenvalues()[0]) * basis.eigenfunction(0);
  CHECK(norm_E_squared(basis, scaled_e1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(norm_E_squared(basis, GridFunction::zero(grid)) == 0.0);

  // Q^{1/2} is an isometry from X onto E over the retained span
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd c = klmap::testing::random_coefficients(basis.rank(), seed);
    const GridFunction x = basis.expand(c);
    const double e_norm = norm_E_squared(basis, apply_sqrtQ(basis, x));
    CHECK(e_norm == doctest::Approx(c.squaredNorm()).epsilon(1e-9));
  }
}

TEST_CASE("grid mismatch is rejected across basis operations") {
  const Kernel kernel{KernelFamily::brownian, 1.0, 1.0};
  const KLBasis basis = kl_decompose(kernel, build_grid(0.0, 1.0, 33), 1e-12);
  const GridFunction other = GridFunction::zero(build_grid(0.0, 1.0, 65));
  CHECK_THROWS_AS(apply_Q(basis, other), GridMismatchError);
  CHECK_THROWS_AS(apply_sqrtQ(basis, other), GridMismatchError);
  CHECK_THROWS_AS(apply_invsqrtQ(basis, other), GridMismatchError);
}

TEST_CASE("prior samples are deterministic and match K-L moments") {
  const GridPtr grid = build_grid(0.0, 1.0, 65);
  const Kernel kernel{KernelFamily::brownian, 1.0, 1.0};
  const KLBasis basis = kl_decompose(kernel, grid, 1e-12);

  SUBCASE("bitwise reproducible") {
    const GridFunction s1 = sample_prior(basis, 123);
    const GridFunction s2 = sample_prior(basis, 123);
    CHECK(s1.values() == s2.values());
    const GridFunction s3 = sample_prior(basis, 124);
    CHECK(s1.values() != s3.values());
  }

  SUBCASE("Monte-Carlo moments over 2000 seeds") {
    const int n_draws = 2000;
    const GridFunction e1 = basis.eigenfunction(0);
    double sum_c = 0.0, sum_c2 = 0.0;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(grid->size());
    for (int s = 0; s < n_draws; ++s) {
      const GridFunction draw = sample_prior(basis, static_cast<std::uint64_t>(s));
      const double c = inner_product_X(draw, e1);
      sum_c += c;
      sum_c2 += c * c;
      mean += draw.values();
    }
    const double var = sum_c2 / n_draws - (sum_c / n_draws) * (sum_c / n_draws);
    CHECK(var == doctest::Approx(basis.eigenvalues()[0]).epsilon(0.10));

    mean /= n_draws;
    const double mean_norm = norm_X(GridFunction(grid, mean));
    CHECK(mean_norm <= 0.1 * std::sqrt(basis.eigenvalues().sum()));
  }
}

}  // TEST_SUITE
