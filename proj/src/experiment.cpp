#include "klmap/experiment.hpp"

#include <utility>

#include "klmap/errors.hpp"
#include "klmap/io.hpp"
#include "klmap/kl_basis.hpp"

namespace klmap {

std::vector<double> resolve_obs_locations(const ExperimentConfig& config) {
  if (config.forward.obs_locations) return *config.forward.obs_locations;
  const int d = config.forward.obs_count.value_or(0);
  std::vector<double> locations(d);
  const double span = config.grid.b - config.grid.a;
  for (int j = 0; j < d; ++j) {
    locations[j] = config.grid.a + span * static_cast<double>(j + 1) /
                                       static_cast<double>(d + 1);
  }
  return locations;
}

Experiment build_experiment(const ExperimentConfig& config,
                            const std::filesystem::path& base_dir) {
  ExperimentConfig effective = config;

  GridPtr grid = build_grid(config.grid.a, config.grid.b, config.grid.m);

  Kernel kernel;
  kernel.family = config.prior.family;
  kernel.variance = config.prior.variance;
  kernel.length_scale = config.prior.length_scale.value_or(1.0);
  kernel.validate();

  KLBasis basis = kl_decompose(kernel, grid, config.prior.drop_tol);

  ForwardModel model;
  model.kind = config.forward.kind;
  model.obs_locations = resolve_obs_locations(config);
  model.blur_width = config.forward.blur_width.value_or(0.0);
  model.nonlinearity_eps = config.forward.nonlinearity_eps.value_or(0.0);
  model.validate(*grid);
  effective.forward.obs_locations = model.obs_locations;
  effective.forward.obs_count.reset();

  NoiseModel noise;
  if (config.noise.variances) {
    noise.variances = Eigen::Map<const Eigen::VectorXd>(config.noise.variances->data(),
                                                        config.noise.variances->size());
  } else {
    noise.variances = Eigen::VectorXd::Constant(model.dim(), *config.noise.variance);
  }
  noise.validate();
  if (noise.dim() != model.dim()) {
    throw ConfigError("noise.variances has " + std::to_string(noise.dim()) +
                      " entries but the forward model observes " +
                      std::to_string(model.dim()) + " points");
  }
  effective.noise.variances =
      std::vector<double>(noise.variances.data(), noise.variances.data() + noise.dim());
  effective.noise.variance.reset();

  // Paths echo as absolute so the effective config replays from anywhere.
  const auto absolutize = [&](const std::string& path) {
    return std::filesystem::weakly_canonical(base_dir / path).string();
  };

  Dataset data;
  if (config.data.mode == ExperimentConfig::DataMode::synthesize) {
    GridFunction truth = GridFunction::zero(grid);
    if (config.data.truth == ExperimentConfig::TruthSource::prior_sample) {
      truth = sample_prior(basis, config.data.truth_seed);
    } else {
      const std::string path = absolutize(*config.data.truth_path);
      truth = GridFunction(grid, read_nodal_csv(path, grid->size()));
      effective.data.truth_path = path;
    }
    data = synthesize_data(model, noise, truth, config.data.seed);
  } else {
    const std::string path = absolutize(*config.data.path);
    data.y = read_dataset_csv(path);
    data.seed = 0;
    effective.data.path = path;
    if (data.y.size() != model.dim()) {
      throw ConfigError("dataset '" + *config.data.path + "' has " +
                        std::to_string(data.y.size()) + " observations, expected " +
                        std::to_string(model.dim()));
    }
    if (config.data.truth_path) {
      const std::string truth_path = absolutize(*config.data.truth_path);
      data.truth = GridFunction(grid, read_nodal_csv(truth_path, grid->size()));
      effective.data.truth_path = truth_path;
    }
  }

  Problem problem(std::move(grid), std::move(kernel), std::move(basis), std::move(model),
                  std::move(noise), std::move(data));
  return Experiment{std::move(problem), std::move(effective)};
}

}  // namespace klmap
