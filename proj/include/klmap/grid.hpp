#pragma once

#include <Eigen/Core>
#include <memory>

namespace klmap {

/// Quadrature grid on [a, b]: the discrete realization of the state space X.
/// The inner product is <f,g>_X = sum_i w_i f_i g_i.
struct Grid {
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  Eigen::VectorXd nodes;    // ascending, nodes[0] = a, nodes[m-1] = b
  Eigen::VectorXd weights;  // positive, sums to b - a

  int size() const { return static_cast<int>(nodes.size()); }

  bool operator==(const Grid& other) const {
    return domain_lo == other.domain_lo && domain_hi == other.domain_hi &&
           nodes.size() == other.nodes.size() && nodes == other.nodes &&
           weights == other.weights;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid with composite trapezoidal weights (ends h/2, interior h).
/// Throws std::invalid_argument for a >= b or m < 3.
GridPtr build_grid(double a, double b, int m);

/// Nodal values of a function on a fixed grid. Immutable after construction.
class GridFunction {
 public:
  GridFunction(GridPtr grid, Eigen::VectorXd values);

  static GridFunction zero(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// Throws GridMismatchError unless both functions share one grid
/// (same object or structurally equal).
void require_same_grid(const GridFunction& f, const GridFunction& g);
bool same_grid(const GridPtr& a, const GridPtr& b);

/// <f,g>_X = sum_i w_i f_i g_i.
double inner_product_X(const GridFunction& f, const GridFunction& g);
double norm_X(const GridFunction& f);

/// Piecewise-linear interpolation, exact at nodes.
/// Throws OutOfDomainError for s outside [a, b].
double evaluate_at(const GridFunction& f, double s);

/// Interpolation stencil at s: value = w_left * f[left] + w_right * f[left+1].
struct InterpStencil {
  int left = 0;
  double w_left = 1.0;
  double w_right = 0.0;
};
InterpStencil interpolation_stencil(const Grid& grid, double s);

GridFunction operator+(const GridFunction& f, const GridFunction& g);
GridFunction operator-(const GridFunction& f, const GridFunction& g);
GridFunction operator*(double c, const GridFunction& f);

}  // namespace klmap
