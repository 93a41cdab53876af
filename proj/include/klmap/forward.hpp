#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "klmap/grid.hpp"

namespace klmap {

enum class ForwardKind { point_observation, convolution, nonlinear_pointwise };

/// Forward map G: X -> R^d.
///   point_observation:  G(u)_j = u(s_j)
///   convolution:        G(u)_j = sum_i w_i g(s_j - t_i) u(t_i), Gaussian bump g
///   nonlinear_pointwise G(u)_j = u(s_j) + eps u(s_j)^3
/// d = 0 (no observations) is permitted and makes the potential identically 0.
struct ForwardModel {
  ForwardKind kind = ForwardKind::point_observation;
  std::vector<double> obs_locations;
  double blur_width = 0.0;       // convolution only
  double nonlinearity_eps = 0.0; // nonlinear_pointwise only

  int dim() const { return static_cast<int>(obs_locations.size()); }
  bool is_linear() const {
    return kind != ForwardKind::nonlinear_pointwise || nonlinearity_eps == 0.0;
  }
  /// Checks locations lie in the grid domain and kind-specific parameters.
  void validate(const Grid& grid) const;
};

/// Diagonal observation-noise covariance C.
struct NoiseModel {
  Eigen::VectorXd variances;  // all > 0

  int dim() const { return static_cast<int>(variances.size()); }
  void validate() const;
};

/// Observations y, optionally with the synthesizing truth, and the noise seed.
struct Dataset {
  Eigen::VectorXd y;
  std::optional<GridFunction> truth;
  std::uint64_t seed = 0;
};

Eigen::VectorXd forward_apply(const ForwardModel& model, const GridFunction& u);

/// J_{j,i} = dG(u)_j / du_i. Independent of u for the linear kinds.
Eigen::MatrixXd forward_jacobian(const ForwardModel& model, const GridFunction& u);

/// The linear observation stage as a d x m matrix: interpolation rows for the
/// pointwise kinds, quadrature-weighted bump rows for convolution.
Eigen::MatrixXd observation_matrix(const ForwardModel& model, const Grid& grid);

/// y = G(truth) + zeta with zeta_j ~ N(0, variances_j), deterministic per seed.
Dataset synthesize_data(const ForwardModel& model, const NoiseModel& noise,
                        const GridFunction& truth, std::uint64_t seed);

std::string to_string(ForwardKind kind);
ForwardKind forward_kind_from_string(const std::string& name);

}  // namespace klmap
