#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "klmap/forward.hpp"
#include "klmap/kernel.hpp"
#include "klmap/optimize.hpp"

namespace klmap {

/// Experiment definition parsed from an INI-style config file: [section]
/// headers with key = value lines, '#'/';' comment lines, strict rejection of
/// unknown sections and keys (diagnostics carry key and line number).
struct ExperimentConfig {
  struct GridSection {
    double a = 0.0;
    double b = 1.0;
    int m = 0;
  } grid;

  struct PriorSection {
    KernelFamily family = KernelFamily::brownian;
    double variance = 1.0;
    std::optional<double> length_scale;
    double drop_tol = 1e-12;
  } prior;

  struct ForwardSection {
    ForwardKind kind = ForwardKind::point_observation;
    std::optional<std::vector<double>> obs_locations;
    std::optional<int> obs_count;  // equally spaced interior points
    std::optional<double> blur_width;
    std::optional<double> nonlinearity_eps;
  } forward;

  struct NoiseSection {
    std::optional<double> variance;                // scalar, broadcast to d
    std::optional<std::vector<double>> variances;  // explicit per-observation
  } noise;

  enum class DataMode { synthesize, load };
  enum class TruthSource { prior_sample, file };

  struct DataSection {
    DataMode mode = DataMode::synthesize;
    TruthSource truth = TruthSource::prior_sample;
    std::uint64_t truth_seed = 0;
    std::optional<std::string> truth_path;
    std::uint64_t seed = 0;                 // observation-noise seed
    std::optional<std::string> path;        // dataset CSV for mode = load
  } data;

  SolverConfig solver;

  struct SweepSection {
    bool present = false;
    std::vector<int> ns;
    int lipschitz_samples = 200;
    std::uint64_t seed = 1;
  } sweep;

  struct OutputSection {
    std::string directory = "out";
    bool emit_svg = false;
  } output;
};

/// Parse and validate; throws ConfigError with "<name>:<line>" diagnostics.
ExperimentConfig parse_config_text(const std::string& text, const std::string& name);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Serialize the config with defaults applied. Reparsing the result yields an
/// equivalent config, so echoed effective configs reproduce identical runs.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace klmap
