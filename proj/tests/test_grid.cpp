#include <doctest.h>

#include <cmath>
#include <numbers>

#include "klmap/errors.hpp"
#include "klmap/grid.hpp"

using namespace klmap;

namespace {

GridFunction sample_function(const GridPtr& grid, double (*f)(double)) {
  Eigen::VectorXd v(grid->size());
  for (int i = 0; i < grid->size(); ++i) v[i] = f(grid->nodes[i]);
  return GridFunction(grid, v);
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("trapezoid weights on [0,1] with 3 nodes") {
  const GridPtr g = build_grid(0.0, 1.0, 3);
  CHECK(g->nodes[0] == 0.0);
  CHECK(g->nodes[1] == 0.5);
  CHECK(g->nodes[2] == 1.0);
  CHECK(g->weights[0] == 0.25);
  CHECK(g->weights[1] == 0.5);
  CHECK(g->weights[2] == 0.25);
}

TEST_CASE("trapezoid weights on [0,1] with 5 nodes") {
  const GridPtr g = build_grid(0.0, 1.0, 5);
  CHECK(g->weights[0] == 0.125);
  CHECK(g->weights[1] == 0.25);
  CHECK(g->weights[2] == 0.25);
  CHECK(g->weights[3] == 0.25);
  CHECK(g->weights[4] == 0.125);
}

TEST_CASE("weights on [-1,1] sum to the domain length") {
  const GridPtr g = build_grid(-1.0, 1.0, 3);
  CHECK(g->weights[0] == 0.5);
  CHECK(g->weights[1] == 1.0);
  CHECK(g->weights[2] == 0.5);
  CHECK(g->weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("weight sums match b - a for assorted grids") {
  for (int m : {3, 7, 64, 513}) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, {-2.5, 3.75}, {1.0, 1.0 + 1e-3}}) {
      const GridPtr g = build_grid(a, b, m);
      CHECK(std::abs(g->weights.sum() - (b - a)) <= 1e-12 * std::abs(b - a));
      for (int i = 0; i < m; ++i) CHECK(g->weights[i] > 0.0);
      for (int i = 1; i < m; ++i) CHECK(g->nodes[i] > g->nodes[i - 1]);
    }
  }
}

TEST_CASE("invalid grid arguments") {
  CHECK_THROWS_AS(build_grid(1.0, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("inner product of constants and linear functions") {
  const GridPtr g = build_grid(0.0, 1.0, 3);
  const GridFunction one(g, Eigen::VectorXd::Ones(3));
  const GridFunction id(g, g->nodes);
  CHECK(inner_product_X(one, one) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(inner_product_X(id, one) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inner_product_X(id, id) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("inner product rejects mismatched grids and accepts equal ones") {
  const GridPtr g1 = build_grid(0.0, 1.0, 5);
  const GridPtr g2 = build_grid(0.0, 1.0, 7);
  const GridFunction f1 = GridFunction::zero(g1);
  const GridFunction f2 = GridFunction::zero(g2);
  CHECK_THROWS_AS(inner_product_X(f1, f2), GridMismatchError);

  // structurally equal grids from separate allocations are interchangeable
  const GridPtr g1b = build_grid(0.0, 1.0, 5);
  const GridFunction f1b = GridFunction::zero(g1b);
  CHECK(inner_product_X(f1, f1b) == 0.0);
}

TEST_CASE("inner product is symmetric and positive definite") {
  const GridPtr g = build_grid(-1.0, 2.0, 17);
  Eigen::VectorXd a(17), b(17);
  for (int i = 0; i < 17; ++i) {
    a[i] = std::sin(3.0 * i) + 0.2 * i;
    b[i] = std::cos(2.0 * i) - 0.1 * i * i;
  }
  const GridFunction fa(g, a), fb(g, b);
  CHECK(inner_product_X(fa, fb) == inner_product_X(fb, fa));
  CHECK(inner_product_X(fa, fa) > 0.0);

  Eigen::VectorXd single = Eigen::VectorXd::Zero(17);
  single[9] = 1e-8;
  CHECK(inner_product_X(GridFunction(g, single), GridFunction(g, single)) > 0.0);
}

TEST_CASE("piecewise-linear interpolation") {
  const GridPtr g = build_grid(0.0, 1.0, 3);
  const GridFunction id(g, g->nodes);
  CHECK(evaluate_at(id, 0.25) == doctest::Approx(0.25).epsilon(1e-15));

  const GridFunction hat(g, Eigen::Vector3d(0.0, 1.0, 0.0));
  CHECK(evaluate_at(hat, 0.75) == doctest::Approx(0.5).epsilon(1e-15));

  SUBCASE("exact at nodes") {
    Eigen::VectorXd v(3);
    v << 0.3, -1.7, 2.9;
    const GridFunction f(g, v);
    for (int k = 0; k < 3; ++k) {
      CHECK(evaluate_at(f, g->nodes[k]) == v[k]);
    }
  }

  SUBCASE("out of domain") {
    CHECK_THROWS_AS(evaluate_at(id, -0.01), OutOfDomainError);
    CHECK_THROWS_AS(evaluate_at(id, 1.01), OutOfDomainError);
  }
}

TEST_CASE("trapezoid norm converges under refinement for sin(pi t)") {
  // On [0,1] the trapezoid rule integrates sin^2(pi t) exactly (periodic
  // integrand), so refinement differences vanish identically there; the
  // domain [0, 0.75] leaves a genuine O(h^2) error to shrink.
  double previous_gap = 0.0;
  bool first = true;
  for (int m : {17, 33, 65}) {
    const GridFunction coarse = sample_function(build_grid(0.0, 0.75, m),
                                                [](double t) { return std::sin(std::numbers::pi * t); });
    const GridFunction fine = sample_function(build_grid(0.0, 0.75, 2 * m - 1),
                                              [](double t) { return std::sin(std::numbers::pi * t); });
    const double gap = std::abs(norm_X(coarse) - norm_X(fine));
    if (!first) CHECK(gap < previous_gap);
    previous_gap = gap;
    first = false;
  }

  // The periodic case is exact at every resolution.
  for (int m : {17, 33, 65}) {
    const GridFunction f = sample_function(build_grid(0.0, 1.0, m),
                                           [](double t) { return std::sin(std::numbers::pi * t); });
    CHECK(norm_X(f) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  }
}

TEST_CASE("grid function arithmetic keeps the grid") {
  const GridPtr g = build_grid(0.0, 1.0, 5);
  const GridFunction f(g, Eigen::VectorXd::Constant(5, 2.0));
  const GridFunction h = 3.0 * f - f + f;
  CHECK(h.values().isApproxToConstant(6.0));
  CHECK(h.grid() == g);
}

}  // TEST_SUITE
