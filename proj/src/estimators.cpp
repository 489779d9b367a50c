#include "cpfit/estimators.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cpfit/error.hpp"
#include "cpfit/gof.hpp"

namespace cpfit {

namespace {

double denominator_value(std::int64_t n_c, Denominator d) {
  return static_cast<double>(d == Denominator::N ? n_c : n_c - 1);
}

void require_overdispersion(const SampleStats& stats, std::string_view estimator) {
  if (!(stats.mean > 0.0 && stats.variance > stats.mean)) {
    throw EstimationError(fmt::format(
        "{} requires variance > mean > 0 (mean={}, variance={})", estimator, stats.mean,
        stats.variance));
  }
}

template <class Params>
DistributionSpec admissible(Params p, std::string_view estimator) {
  try {
    return DistributionSpec(p);
  } catch (const DomainError& e) {
    throw EstimationError(fmt::format("{}: estimate outside parameter domain: {}", estimator,
                                      e.what()));
  }
}

}  // namespace

std::string_view denominator_token(Denominator d) {
  return d == Denominator::N ? "n" : "n-1";
}

Denominator parse_denominator(std::string_view token) {
  if (token == "n") {
    return Denominator::N;
  }
  if (token == "n-1") {
    return Denominator::NMinusOne;
  }
  throw DomainError(fmt::format("unknown variance denominator '{}'", token));
}

SampleStats SampleStats::with_denominator(Denominator target) const {
  SampleStats out = *this;
  out.variance = variance * denominator_value(n_c, denominator) / denominator_value(n_c, target);
  out.denominator = target;
  return out;
}

SampleStats sample_stats(const CountHistogram& histogram, Denominator denominator) {
  const std::int64_t n_c = histogram.total();
  if (denominator == Denominator::NMinusOne && n_c < 2) {
    throw DataError("sample variance with denominator N-1 needs at least two observations");
  }
  const auto counts = histogram.counts();
  std::int64_t first_moment = 0;
  for (std::size_t n = 0; n < counts.size(); ++n) {
    first_moment += static_cast<std::int64_t>(n) * counts[n];
  }
  const double mean = static_cast<double>(first_moment) / static_cast<double>(n_c);
  double ss = 0.0;
  for (std::size_t n = 0; n < counts.size(); ++n) {
    const double d = static_cast<double>(n) - mean;
    ss += static_cast<double>(counts[n]) * d * d;
  }
  return {n_c, mean, ss / denominator_value(n_c, denominator), denominator};
}

SampleStats recover_exact_stats(std::int64_t n_c, double mean, double variance,
                                Denominator denominator, double resolution) {
  if (n_c < 2) {
    throw DataError("at least two observations are required");
  }
  const double n = static_cast<double>(n_c);
  const double d = denominator_value(n_c, denominator);
  if (!(resolution > 0.0) || 1.0 / d <= resolution) {
    throw DataError(fmt::format("a rounding resolution of {} cannot resolve N_c = {}",
                                resolution, n_c));
  }
  const double tolerance = 0.5 * resolution * (1.0 + 1e-9);

  const double s1 = std::round(mean * n);
  const double exact_mean = s1 / n;
  if (std::abs(exact_mean - mean) > tolerance) {
    throw DataError(fmt::format("mean {} is not a rounded multiple of 1/{}", mean, n_c));
  }
  const double shift = s1 * s1 / n;
  const double s2 = std::round(variance * d + shift);
  const double exact_variance = (s2 - shift) / d;
  if (std::abs(exact_variance - variance) > tolerance) {
    throw DataError(
        fmt::format("variance {} is inconsistent with integer data of size {}", variance, n_c));
  }
  return {n_c, exact_mean, exact_variance, denominator};
}

params::Poisson mom_poisson(const SampleStats& stats) {
  if (!(stats.mean > 0.0)) {
    throw EstimationError("Poisson fit requires a positive mean");
  }
  return {stats.mean};
}

params::NeymanTypeA mom_neyman(const SampleStats& stats) {
  require_overdispersion(stats, "Neyman Type A moments");
  const double phi = (stats.variance - stats.mean) / stats.mean;
  return {stats.mean / phi, phi};
}

params::GeometricPoisson mom_geometric(const SampleStats& stats) {
  require_overdispersion(stats, "geometric Poisson moments");
  const double sum = stats.variance + stats.mean;
  return {2.0 * stats.mean * stats.mean / sum, (stats.variance - stats.mean) / sum};
}

params::PoissonBinomial mom_poisson_binomial(const SampleStats& stats, int k) {
  if (k < 2) {
    throw EstimationError(fmt::format("Poisson-binomial moments need k >= 2, got {}", k));
  }
  require_overdispersion(stats, "Poisson-binomial moments");
  const double p = (stats.variance - stats.mean) / ((k - 1) * stats.mean);
  if (!(p < 1.0)) {
    throw EstimationError(fmt::format("Poisson-binomial moments give p = {} >= 1 for k = {}", p, k));
  }
  return {stats.mean / (k * p), k, p};
}

params::PoissonPascal mom_poisson_pascal(const SampleStats& stats, int k) {
  if (k < 1) {
    throw EstimationError(fmt::format("Poisson-Pascal moments need k >= 1, got {}", k));
  }
  require_overdispersion(stats, "Poisson-Pascal moments");
  // variance / mean - 1 = (k + 1) P
  const double P = (stats.variance - stats.mean) / ((k + 1) * stats.mean);
  return {stats.mean / (k * P), k, P};
}

params::GeometricPoisson geometric_p0h1(const CountHistogram& histogram) {
  const std::int64_t n_c = histogram.total();
  const std::int64_t c0 = histogram[0];
  const std::int64_t c1 = histogram[1];
  if (c0 == 0 || c0 == n_c) {
    throw EstimationError("P0/h1 estimator needs 0 < c_0 < N_c");
  }
  const double lambda = -std::log(static_cast<double>(c0) / static_cast<double>(n_c));
  const double q = (static_cast<double>(c1) / static_cast<double>(c0)) / lambda;
  if (!(q > 0.0 && q < 1.0)) {
    throw EstimationError(fmt::format("P0/h1 estimator gives q = {} outside (0, 1)", q));
  }
  return {lambda, 1.0 - q};
}

params::NegativeBinomial mom_negative_binomial(const SampleStats& stats, bool round_k) {
  require_overdispersion(stats, "negative binomial moments");
  double k = stats.mean * stats.mean / (stats.variance - stats.mean);
  if (round_k) {
    k = std::max(1.0, std::round(k));
  }
  return {k, k / (k + stats.mean)};
}

params::NegativeBinomial negative_binomial_fixed_k(const SampleStats& stats, double k) {
  if (!(k > 0.0)) {
    throw EstimationError(fmt::format("negative binomial index must be positive, got {}", k));
  }
  if (!(stats.mean > 0.0)) {
    throw EstimationError("negative binomial fit requires a positive mean");
  }
  return {k, k / (k + stats.mean)};
}

std::string_view method_token(Method m) {
  switch (m) {
    case Method::MM:
      return "mm";
    case Method::P0H1:
      return "p0h1";
    case Method::PS:
      return "ps";
    case Method::NBMM:
      return "nb";
  }
  return "unknown";
}

Method parse_method(std::string_view token) {
  for (Method m : {Method::MM, Method::P0H1, Method::PS, Method::NBMM}) {
    if (method_token(m) == token) {
      return m;
    }
  }
  throw DomainError(fmt::format("unknown estimation method '{}'", token));
}

FitResult score_fit(const DistributionSpec& spec, Method method, const CountHistogram& histogram,
                    const SampleStats& stats, std::optional<PeakCandidate> peak) {
  const GofReport report = assess_fit(spec, histogram, stats.variance);
  FitResult result{spec, method, stats.denominator, {}, {}, report.delta, report.chi_square, peak};
  result.observed.reserve(report.per_bin.size());
  result.fitted_counts.reserve(report.per_bin.size());
  for (const auto& bin : report.per_bin) {
    result.observed.push_back(bin.observed);
    result.fitted_counts.push_back(bin.fitted);
  }
  return result;
}

std::optional<DistributionSpec> spec_from_generalizer_mean(const PsModel& model,
                                                           double generalizer_mean,
                                                           double sample_mean) {
  if (!(generalizer_mean > 0.0 && std::isfinite(generalizer_mean) && sample_mean > 0.0)) {
    return std::nullopt;
  }
  const double lambda = sample_mean / generalizer_mean;
  switch (model.family) {
    case Family::NeymanTypeA:
      return DistributionSpec(params::NeymanTypeA{lambda, generalizer_mean});
    case Family::PoissonBinomial: {
      const double p = generalizer_mean / model.k;
      if (model.k < 1 || !(p < 1.0)) {
        return std::nullopt;
      }
      return DistributionSpec(params::PoissonBinomial{lambda, model.k, p});
    }
    case Family::PoissonPascal:
      if (model.k < 1) {
        return std::nullopt;
      }
      return DistributionSpec(params::PoissonPascal{lambda, model.k, generalizer_mean / model.k});
    case Family::GeometricPoisson:
      return DistributionSpec(pascal_to_geometric({lambda, 1, generalizer_mean}));
    default:
      throw EstimationError(fmt::format("power-spectrum estimator does not support family '{}'",
                                        family_token(model.family)));
  }
}

PsEstimate ps_estimate(const CountHistogram& histogram, const PsModel& model,
                       const PsConfig& config) {
  const SampleStats stats = sample_stats(histogram, config.denominator);
  if (!(stats.variance > 0.0)) {
    throw EstimationError("power-spectrum estimator needs a positive sample variance");
  }
  const PowerSpectrum spectrum = power_spectrum(histogram, config.n_dft);
  const auto peaks = find_peaks(spectrum);
  const auto candidates = candidate_means(peaks, config.m_max);

  std::vector<PsScanEntry> scan;
  std::optional<std::size_t> best;
  for (const auto& candidate : candidates) {
    auto spec = spec_from_generalizer_mean(model, candidate.generalizer_mean, stats.mean);
    if (!spec) {
      continue;
    }
    const GofReport report = assess_fit(*spec, histogram, stats.variance);
    scan.push_back({candidate, *spec, report.delta});
    if (!best || report.delta < scan[*best].delta) {
      best = scan.size() - 1;
    }
  }
  if (!best) {
    throw EstimationError("no admissible power-spectrum candidate");
  }
  const PsScanEntry chosen = scan[*best];
  return {score_fit(chosen.spec, Method::PS, histogram, stats, chosen.candidate), std::move(scan)};
}

FitResult fit(const CountHistogram& histogram, const FitRequest& request) {
  const SampleStats stats = sample_stats(histogram, request.config.denominator);
  const Family family = request.family;
  auto unsupported = [&] {
    return EstimationError(fmt::format("method '{}' does not apply to family '{}'",
                                       method_token(request.method), family_token(family)));
  };

  switch (request.method) {
    case Method::MM: {
      switch (family) {
        case Family::Poisson:
          return score_fit(admissible(mom_poisson(stats), "mm"), Method::MM, histogram, stats);
        case Family::NeymanTypeA:
          return score_fit(admissible(mom_neyman(stats), "mm"), Method::MM, histogram, stats);
        case Family::PoissonBinomial:
          return score_fit(admissible(mom_poisson_binomial(stats, request.k), "mm"), Method::MM,
                           histogram, stats);
        case Family::PoissonPascal:
          return score_fit(admissible(mom_poisson_pascal(stats, request.k), "mm"), Method::MM,
                           histogram, stats);
        case Family::GeometricPoisson:
          return score_fit(admissible(mom_geometric(stats), "mm"), Method::MM, histogram, stats);
        case Family::NegativeBinomial:
          return score_fit(admissible(mom_negative_binomial(stats, request.round_k), "nb"),
                           Method::NBMM, histogram, stats);
      }
      break;
    }
    case Method::P0H1:
      if (family != Family::GeometricPoisson) {
        throw unsupported();
      }
      return score_fit(admissible(geometric_p0h1(histogram), "p0h1"), Method::P0H1, histogram,
                       stats);
    case Method::PS:
      if (family == Family::Poisson || family == Family::NegativeBinomial) {
        throw unsupported();
      }
      return ps_estimate(histogram, {family, request.k}, request.config).fit;
    case Method::NBMM:
      if (family != Family::NegativeBinomial) {
        throw unsupported();
      }
      return score_fit(admissible(mom_negative_binomial(stats, request.round_k), "nb"),
                       Method::NBMM, histogram, stats);
  }
  throw unsupported();
}

KScan scan_k(const CountHistogram& histogram, const FitRequest& request, int k_min, int k_max) {
  if (k_min < 1 || k_max < k_min) {
    throw DomainError(fmt::format("invalid k scan range {}:{}", k_min, k_max));
  }
  const bool negative_binomial = request.family == Family::NegativeBinomial;
  if (!negative_binomial && request.family != Family::PoissonBinomial &&
      request.family != Family::PoissonPascal) {
    throw EstimationError(fmt::format("k scan does not apply to family '{}'",
                                      family_token(request.family)));
  }
  const SampleStats stats = sample_stats(histogram, request.config.denominator);

  KScan scan{{}, 0};
  for (int k = k_min; k <= k_max; ++k) {
    try {
      if (negative_binomial) {
        scan.fits.push_back(score_fit(
            admissible(negative_binomial_fixed_k(stats, k), "nb"), Method::NBMM, histogram, stats));
      } else {
        FitRequest r = request;
        r.k = k;
        scan.fits.push_back(fit(histogram, r));
      }
    } catch (const EstimationError&) {
      // inadmissible for this k; the scan continues
    }
  }
  if (scan.fits.empty()) {
    throw EstimationError("no admissible k in scan range");
  }
  for (std::size_t i = 1; i < scan.fits.size(); ++i) {
    if (scan.fits[i].delta < scan.fits[scan.best].delta) {
      scan.best = i;
    }
  }
  return scan;
}

}  // namespace cpfit
