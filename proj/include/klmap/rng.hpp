#pragma once

#include <cstdint>

namespace klmap {

// Counter-based randomness: every variate is a pure function of
// (seed, stream, counter). Sequences are reproducible independent of call
// order, and the first k draws of a stream do not change when more draws
// are requested later (prefix stability, needed by the Lipschitz sampler).
//
// Streams separate the purposes a seed is used for, so e.g. sampling a prior
// draw and synthesizing noise with the same seed never share variates.
enum class RngStream : std::uint64_t {
  prior_sample = 1,
  observation_noise = 2,
  lipschitz_pairs = 3,
  lipschitz_gradients = 4,
  perturbations = 5,
  gradcheck_points = 6,
  gradcheck_directions = 7,
  generic = 8,
};

/// 64-bit hash of (seed, stream, counter); splitmix-style finalizer chain.
std::uint64_t rng_word(std::uint64_t seed, RngStream stream, std::uint64_t counter);

/// Uniform variate strictly inside (0, 1).
double rng_uniform(std::uint64_t seed, RngStream stream, std::uint64_t counter);

/// Standard normal via inverse-CDF transform of rng_uniform. Pure arithmetic
/// (no libm distribution objects), so results are stable across platforms.
double rng_normal(std::uint64_t seed, RngStream stream, std::uint64_t counter);

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 over (0,1)).
double inverse_normal_cdf(double p);

}  // namespace klmap
