#include "klmap/forward.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "klmap/errors.hpp"
#include "klmap/rng.hpp"

namespace klmap {

void ForwardModel::validate(const Grid& grid) const {
  for (double s : obs_locations) {
    if (!(s >= grid.domain_lo && s <= grid.domain_hi)) {
      throw OutOfDomainError("observation location " + std::to_string(s) +
                             " outside the grid domain");
    }
  }
  if (kind == ForwardKind::convolution && !(blur_width > 0.0)) {
    throw std::invalid_argument("convolution blur_width must be positive");
  }
}

void NoiseModel::validate() const {
  for (int j = 0; j < variances.size(); ++j) {
    if (!(variances[j] > 0.0)) {
      throw std::invalid_argument("noise variances must be positive");
    }
  }
}

Eigen::MatrixXd observation_matrix(const ForwardModel& model, const Grid& grid) {
  model.validate(grid);
  const int d = model.dim();
  const int m = grid.size();
  Eigen::MatrixXd obs = Eigen::MatrixXd::Zero(d, m);
  switch (model.kind) {
    case ForwardKind::point_observation:
    case ForwardKind::nonlinear_pointwise:
      for (int j = 0; j < d; ++j) {
        const InterpStencil st = interpolation_stencil(grid, model.obs_locations[j]);
        obs(j, st.left) = st.w_left;
        obs(j, st.left + 1) += st.w_right;
      }
      break;
    case ForwardKind::convolution: {
      const double bw = model.blur_width;
      const double norm = 1.0 / (bw * std::sqrt(2.0 * std::numbers::pi));
      for (int j = 0; j < d; ++j) {
        for (int i = 0; i < m; ++i) {
          const double r = model.obs_locations[j] - grid.nodes[i];
          obs(j, i) = grid.weights[i] * norm * std::exp(-r * r / (2.0 * bw * bw));
        }
      }
      break;
    }
  }
  return obs;
}

Eigen::VectorXd forward_apply(const ForwardModel& model, const GridFunction& u) {
  model.validate(*u.grid());
  const int d = model.dim();
  Eigen::VectorXd out(d);
  switch (model.kind) {
    case ForwardKind::point_observation:
      for (int j = 0; j < d; ++j) out[j] = evaluate_at(u, model.obs_locations[j]);
      break;
    case ForwardKind::nonlinear_pointwise:
      for (int j = 0; j < d; ++j) {
        const double v = evaluate_at(u, model.obs_locations[j]);
        out[j] = v + model.nonlinearity_eps * v * v * v;
      }
      break;
    case ForwardKind::convolution:
      out = observation_matrix(model, *u.grid()) * u.values();
      break;
  }
  return out;
}

Eigen::MatrixXd forward_jacobian(const ForwardModel& model, const GridFunction& u) {
  Eigen::MatrixXd jac = observation_matrix(model, *u.grid());
  if (model.kind == ForwardKind::nonlinear_pointwise) {
    for (int j = 0; j < model.dim(); ++j) {
      const double v = evaluate_at(u, model.obs_locations[j]);
      jac.row(j) *= 1.0 + 3.0 * model.nonlinearity_eps * v * v;
    }
  }
  return jac;
}

Dataset synthesize_data(const ForwardModel& model, const NoiseModel& noise,
                        const GridFunction& truth, std::uint64_t seed) {
  noise.validate();
  if (noise.dim() != model.dim()) {
    throw DimensionError("noise dimension " + std::to_string(noise.dim()) +
                         " does not match forward dimension " + std::to_string(model.dim()));
  }
  Dataset data;
  data.seed = seed;
  data.truth = truth;
  data.y = forward_apply(model, truth);
  for (int j = 0; j < data.y.size(); ++j) {
    data.y[j] += std::sqrt(noise.variances[j]) *
                 rng_normal(seed, RngStream::observation_noise, static_cast<std::uint64_t>(j));
  }
  return data;
}

std::string to_string(ForwardKind kind) {
  switch (kind) {
    case ForwardKind::point_observation:
      return "point_observation";
    case ForwardKind::convolution:
      return "convolution";
    case ForwardKind::nonlinear_pointwise:
      return "nonlinear_pointwise";
  }
  return "unknown";
}

ForwardKind forward_kind_from_string(const std::string& name) {
  if (name == "point_observation") return ForwardKind::point_observation;
  if (name == "convolution") return ForwardKind::convolution;
  if (name == "nonlinear_pointwise") return ForwardKind::nonlinear_pointwise;
  throw std::invalid_argument("unknown forward kind '" + name + "'");
}

}  // namespace klmap
