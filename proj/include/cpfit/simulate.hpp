#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "cpfit/distribution.hpp"
#include "cpfit/histogram.hpp"

namespace cpfit {

/// Identifier recorded in the source field of simulated histograms.
///
/// Samples are split into blocks of kSimulationBlock indices; block b draws
/// from std::mt19937_64 seeded with splitmix64(seed + (b + 1) * 0x9E3779B97F4A7C15).
/// Uniforms take the top 53 bits. Poisson variates use inversion below rate
/// 10 and Hoermann's PTRS above; the other laws use inversion.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64-splitmix64-blocks/v1";
inline constexpr std::size_t kSimulationBlock = 65536;

/// Draws n_samples variates by compounding: a Poisson number of clusters,
/// each an independent generalizer variate. The negative binomial is drawn
/// as Poisson(-k ln p) clusters of logarithmic(q) variates.
CountHistogram simulate(const DistributionSpec& spec, std::size_t n_samples, std::uint64_t seed);

}  // namespace cpfit
