#include "klmap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "klmap/errors.hpp"

namespace klmap {

GridPtr build_grid(double a, double b, int m) {
  if (!(a < b)) {
    throw std::invalid_argument("build_grid: require a < b, got a=" + std::to_string(a) +
                                " b=" + std::to_string(b));
  }
  if (m < 3) {
    throw std::invalid_argument("build_grid: require m >= 3, got m=" + std::to_string(m));
  }
  auto grid = std::make_shared<Grid>();
  grid->domain_lo = a;
  grid->domain_hi = b;
  grid->nodes.resize(m);
  grid->weights.resize(m);
  const double h = (b - a) / static_cast<double>(m - 1);
  for (int i = 0; i < m; ++i) {
    grid->nodes[i] = a + h * static_cast<double>(i);
    grid->weights[i] = h;
  }
  grid->nodes[0] = a;
  grid->nodes[m - 1] = b;  // pin endpoints against accumulation error
  grid->weights[0] = 0.5 * h;
  grid->weights[m - 1] = 0.5 * h;
  return grid;
}

GridFunction::GridFunction(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw std::invalid_argument("GridFunction: null grid");
  }
  if (values_.size() != grid_->nodes.size()) {
    throw DimensionError("GridFunction: " + std::to_string(values_.size()) +
                         " values on a grid of " + std::to_string(grid_->nodes.size()) +
                         " nodes");
  }
}

GridFunction GridFunction::zero(GridPtr grid) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->size());
  return GridFunction(std::move(grid), std::move(v));
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!same_grid(f.grid(), g.grid())) {
    throw GridMismatchError("operands live on different grids");
  }
}

double inner_product_X(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  return f.grid()->weights.dot(f.values().cwiseProduct(g.values()));
}

double norm_X(const GridFunction& f) {
  return std::sqrt(f.grid()->weights.dot(f.values().cwiseAbs2()));
}

InterpStencil interpolation_stencil(const Grid& grid, double s) {
  if (!(s >= grid.domain_lo && s <= grid.domain_hi)) {
    throw OutOfDomainError("evaluation point " + std::to_string(s) + " outside [" +
                           std::to_string(grid.domain_lo) + ", " +
                           std::to_string(grid.domain_hi) + "]");
  }
  const auto& t = grid.nodes;
  const int m = grid.size();
  // Last node <= s, clamped so s == b uses the final segment.
  const double* begin = t.data();
  int i = static_cast<int>(std::upper_bound(begin, begin + m, s) - begin) - 1;
  i = std::clamp(i, 0, m - 2);

  InterpStencil st;
  st.left = i;
  if (s == t[i]) {
    st.w_left = 1.0;
    st.w_right = 0.0;
  } else if (s == t[i + 1]) {
    st.w_left = 0.0;
    st.w_right = 1.0;
  } else {
    const double lam = (s - t[i]) / (t[i + 1] - t[i]);
    st.w_left = 1.0 - lam;
    st.w_right = lam;
  }
  return st;
}

double evaluate_at(const GridFunction& f, double s) {
  const InterpStencil st = interpolation_stencil(*f.grid(), s);
  if (st.w_right == 0.0) return f.values()[st.left];
  if (st.w_left == 0.0) return f.values()[st.left + 1];
  return st.w_left * f.values()[st.left] + st.w_right * f.values()[st.left + 1];
}

GridFunction operator+(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  return GridFunction(f.grid(), f.values() + g.values());
}

GridFunction operator-(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  return GridFunction(f.grid(), f.values() - g.values());
}

GridFunction operator*(double c, const GridFunction& f) {
  return GridFunction(f.grid(), c * f.values());
}

}  // namespace klmap
