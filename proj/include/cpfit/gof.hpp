#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cpfit/distribution.hpp"
#include "cpfit/histogram.hpp"

namespace cpfit {

/// Cumulative model mass that fixes the upper end of the fitted bin range.
inline constexpr double kFitRangeMass = 1.0 - 1e-9;

/// f_n = N_c P_n for n < n_bins.
std::vector<double> fitted_counts(const DistributionSpec& spec, std::int64_t n_c,
                                  std::size_t n_bins);

/// Delta = sum_n (c_n - f_n)^2 / (N_c s^2). Throws DomainError if s2 <= 0
/// or the arrays differ in length.
double delta_statistic(std::span<const std::int64_t> observed, std::span<const double> fitted,
                       std::int64_t n_c, double s2);

/// Chi-square = sum_n (c_n - f_n)^2 / f_n without bin aggregation. Throws
/// DomainError if some f_n <= 0.
double chi_square(std::span<const std::int64_t> observed, std::span<const double> fitted);

struct BinContribution {
  std::size_t n;
  std::int64_t observed;
  double fitted;
  double delta_term;
};

struct GofReport {
  double delta;
  /// +infinity when a fitted count underflows to zero inside the range.
  double chi_square;
  std::vector<BinContribution> per_bin;
};

/// Number of bins used when scoring a fit: bins 0..max(last nonzero c_n,
/// first n whose cumulative model mass exceeds kFitRangeMass).
std::size_t fit_bin_count(const CountHistogram& histogram, const PmfVector& pmf);

/// Fitted counts, Delta (with the supplied s^2) and chi-square over the
/// range given by fit_bin_count.
GofReport assess_fit(const DistributionSpec& spec, const CountHistogram& histogram, double s2);

}  // namespace cpfit
