#pragma once

#include <filesystem>

#include "klmap/config.hpp"
#include "klmap/objective.hpp"

namespace klmap {

/// Materialized experiment: the Problem plus the effective config (defaults
/// applied, observation locations and noise variances resolved).
struct Experiment {
  Problem problem;
  ExperimentConfig effective;
};

/// Resolve obs_count to equally spaced interior locations
/// s_j = a + j (b-a)/(d+1), j = 1..d.
std::vector<double> resolve_obs_locations(const ExperimentConfig& config);

/// Build grid, basis, forward model, noise and data from a config. Relative
/// paths in [data] are resolved against base_dir.
Experiment build_experiment(const ExperimentConfig& config,
                            const std::filesystem::path& base_dir = ".");

}  // namespace klmap
