#include "cpfit/gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cpfit/error.hpp"

namespace cpfit {

namespace {

void require_aligned(std::size_t observed, std::size_t fitted) {
  if (observed != fitted) {
    throw DomainError(
        fmt::format("observed ({}) and fitted ({}) bin counts differ", observed, fitted));
  }
}

// Extends the pmf to at least n terms if the automatic truncation is shorter.
PmfVector pmf_covering(const DistributionSpec& spec, std::size_t n) {
  PmfVector pmf = family_pmf(spec);
  if (pmf.size() < n) {
    pmf = family_pmf(spec, n);
  }
  return pmf;
}

}  // namespace

std::vector<double> fitted_counts(const DistributionSpec& spec, std::int64_t n_c,
                                  std::size_t n_bins) {
  if (n_c < 1) {
    throw DomainError("total count must be positive");
  }
  if (n_bins < 1) {
    throw DomainError("at least one bin is required");
  }
  const PmfVector pmf = family_pmf(spec, n_bins);
  std::vector<double> f(n_bins);
  const double total = static_cast<double>(n_c);
  for (std::size_t n = 0; n < n_bins; ++n) {
    f[n] = total * pmf[n];
  }
  return f;
}

double delta_statistic(std::span<const std::int64_t> observed, std::span<const double> fitted,
                       std::int64_t n_c, double s2) {
  require_aligned(observed.size(), fitted.size());
  if (!(s2 > 0.0)) {
    throw DomainError(fmt::format("sample variance must be positive, got {}", s2));
  }
  if (n_c < 1) {
    throw DomainError("total count must be positive");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < observed.size(); ++n) {
    const double d = static_cast<double>(observed[n]) - fitted[n];
    sum += d * d;
  }
  return sum / (static_cast<double>(n_c) * s2);
}

double chi_square(std::span<const std::int64_t> observed, std::span<const double> fitted) {
  require_aligned(observed.size(), fitted.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < observed.size(); ++n) {
    if (!(fitted[n] > 0.0)) {
      throw DomainError(fmt::format("fitted count in bin {} is not positive", n));
    }
    const double d = static_cast<double>(observed[n]) - fitted[n];
    sum += d * d / fitted[n];
  }
  return sum;
}

std::size_t fit_bin_count(const CountHistogram& histogram, const PmfVector& pmf) {
  std::size_t model_end = pmf.size() - 1;
  double cumulative = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    cumulative += pmf[n];
    if (cumulative > kFitRangeMass) {
      model_end = n;
      break;
    }
  }
  return std::max(histogram.last_nonzero(), model_end) + 1;
}

GofReport assess_fit(const DistributionSpec& spec, const CountHistogram& histogram, double s2) {
  const PmfVector pmf = pmf_covering(spec, histogram.last_nonzero() + 1);
  const std::size_t bins = fit_bin_count(histogram, pmf);

  std::vector<std::int64_t> observed(bins);
  std::vector<double> fitted(bins);
  const double total = static_cast<double>(histogram.total());
  for (std::size_t n = 0; n < bins; ++n) {
    observed[n] = histogram[n];
    fitted[n] = total * pmf[n];
  }

  GofReport report;
  report.delta = delta_statistic(observed, fitted, histogram.total(), s2);
  const bool all_positive =
      std::all_of(fitted.begin(), fitted.end(), [](double f) { return f > 0.0; });
  report.chi_square =
      all_positive ? chi_square(observed, fitted) : std::numeric_limits<double>::infinity();

  const double denom = total * s2;
  report.per_bin.reserve(bins);
  for (std::size_t n = 0; n < bins; ++n) {
    const double d = static_cast<double>(observed[n]) - fitted[n];
    report.per_bin.push_back({n, observed[n], fitted[n], d * d / denom});
  }
  return report;
}

}  // namespace cpfit
