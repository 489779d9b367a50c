#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cpfit/distribution.hpp"
#include "cpfit/histogram.hpp"
#include "cpfit/spectrum.hpp"

namespace cpfit {

/// Denominator of the sample variance: N_c or N_c - 1.
enum class Denominator { N, NMinusOne };

std::string_view denominator_token(Denominator d);  // "n" / "n-1"
Denominator parse_denominator(std::string_view token);

struct SampleStats {
  std::int64_t n_c;
  double mean;
  double variance;
  Denominator denominator;

  /// Same data, variance rescaled to the other denominator.
  SampleStats with_denominator(Denominator target) const;
};

/// Binned sample mean sum n c_n / N_c and variance sum c_n (n - mean)^2 / d.
SampleStats sample_stats(const CountHistogram& histogram,
                         Denominator denominator = Denominator::NMinusOne);

/// Recovers the exact statistics of integer data from a published mean and
/// variance rounded to `resolution` (e.g. 1e-4 for four decimals).
///
/// Binned data give mean = S1 / N_c and variance = (S2 - S1^2 / N_c) / d with
/// integer S1, S2, so when 1/N_c and 1/d are coarser than the rounding the
/// nearest lattice point is unique. Throws DataError when the published
/// values are not within resolution/2 of any lattice point or the lattice is
/// too fine to resolve.
SampleStats recover_exact_stats(std::int64_t n_c, double mean, double variance,
                                Denominator denominator, double resolution);

// Method-of-moments estimators. Each throws EstimationError unless
// variance > mean > 0, or when the estimate leaves the parameter domain.
params::Poisson mom_poisson(const SampleStats& stats);
params::NeymanTypeA mom_neyman(const SampleStats& stats);
params::GeometricPoisson mom_geometric(const SampleStats& stats);
params::PoissonBinomial mom_poisson_binomial(const SampleStats& stats, int k);
params::PoissonPascal mom_poisson_pascal(const SampleStats& stats, int k);

/// Geometric Poisson from the first two bins: lambda = -ln(c_0 / N_c),
/// q = (c_1 / c_0) / lambda.
params::GeometricPoisson geometric_p0h1(const CountHistogram& histogram);

/// k = mean^2 / (variance - mean), p = k / (k + mean). With round_k the index
/// is rounded to the nearest positive integer before p is computed.
params::NegativeBinomial mom_negative_binomial(const SampleStats& stats, bool round_k);

/// Negative binomial with a fixed index: p = k / (k + mean).
params::NegativeBinomial negative_binomial_fixed_k(const SampleStats& stats, double k);

enum class Method { MM, P0H1, PS, NBMM };

std::string_view method_token(Method m);  // "mm", "p0h1", "ps", "nb"
Method parse_method(std::string_view token);

struct FitResult {
  DistributionSpec spec;
  Method method;
  Denominator denominator;
  std::vector<std::int64_t> observed;
  std::vector<double> fitted_counts;
  double delta;
  double chi_square;
  std::optional<PeakCandidate> peak;

  bool operator==(const FitResult&) const = default;
};

/// Scores a fitted spec against the histogram (range per fit_bin_count,
/// Delta with stats.variance).
FitResult score_fit(const DistributionSpec& spec, Method method, const CountHistogram& histogram,
                    const SampleStats& stats, std::optional<PeakCandidate> peak = std::nullopt);

/// Family and fixed index for the power-spectrum estimator. Supported:
/// NeymanTypeA, PoissonBinomial (k >= 1), PoissonPascal (k >= 1) and
/// GeometricPoisson (fitted as Poisson-Pascal with k = 1).
struct PsModel {
  Family family = Family::NeymanTypeA;
  int k = 1;
};

struct PsConfig {
  std::size_t n_dft = kDefaultDftLength;
  unsigned m_max = kDefaultAliasMax;
  Denominator denominator = Denominator::NMinusOne;
};

/// Maps an estimate of E[B] to family parameters with the outer rate set so
/// that the model mean equals sample_mean. Returns nullopt when the mapping
/// leaves the parameter domain (e.g. Poisson-binomial p = E[B]/k >= 1).
std::optional<DistributionSpec> spec_from_generalizer_mean(const PsModel& model,
                                                           double generalizer_mean,
                                                           double sample_mean);

struct PsScanEntry {
  PeakCandidate candidate;
  DistributionSpec spec;
  double delta;
};

struct PsEstimate {
  FitResult fit;
  /// Every admissible candidate in (nu, m) order with its Delta.
  std::vector<PsScanEntry> scan;
};

/// Power-spectrum estimator: empirical spectrum, peak and alias candidates,
/// then the admissible candidate with the smallest Delta (ties resolved
/// towards smaller nu, then smaller m). Throws EstimationError when no
/// candidate is admissible.
PsEstimate ps_estimate(const CountHistogram& histogram, const PsModel& model,
                       const PsConfig& config = {});

struct FitRequest {
  Family family = Family::NeymanTypeA;
  Method method = Method::MM;
  int k = 1;
  bool round_k = false;
  PsConfig config;
};

/// One estimator run, scored. Throws EstimationError when the method does
/// not apply to the family or the estimate is inadmissible.
FitResult fit(const CountHistogram& histogram, const FitRequest& request);

struct KScan {
  std::vector<FitResult> fits;  ///< admissible k values only, ascending k
  std::size_t best;             ///< index of the smallest Delta
};

/// Integer index scan for Poisson-binomial / Poisson-Pascal (method mm or ps)
/// and for the negative binomial (p = k / (k + mean) for each k).
KScan scan_k(const CountHistogram& histogram, const FitRequest& request, int k_min, int k_max);

}  // namespace cpfit
