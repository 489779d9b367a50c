#include "cpfit/distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "cpfit/error.hpp"

namespace cpfit {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 6> kFamilyTokens{{
    {Family::Poisson, "poisson"},
    {Family::NeymanTypeA, "neyman"},
    {Family::PoissonBinomial, "pbinom"},
    {Family::PoissonPascal, "pascal"},
    {Family::GeometricPoisson, "geom"},
    {Family::NegativeBinomial, "negbinom"},
}};

void require(bool ok, std::string_view what) {
  if (!ok) {
    throw DomainError(std::string(what));
  }
}

void require_rate(double value, std::string_view name) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw DomainError(fmt::format("{} must be a finite positive rate, got {}", name, value));
  }
}

void require_probability(double value, std::string_view name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError(fmt::format("{} must lie strictly inside (0, 1), got {}", name, value));
  }
}

void require_index(int k) {
  if (k < 1) {
    throw DomainError(fmt::format("index k must be a positive integer, got {}", k));
  }
}

// Rescaling threshold for the h_n recursions.
constexpr double kRescaleAbove = 1e250;
constexpr double kRescaleFactor = 1e-250;
const double kLogRescale = 250.0 * std::log(10.0);

// Turns h_n (stored as values * exp(log_scale)) and log P_0 into a PmfVector.
PmfVector assemble(double log_p0, const std::vector<double>& values, double log_scale) {
  const std::size_t n = values.size();
  std::vector<double> masses(n);
  std::vector<double> scaled(n);
  const double p0 = std::exp(log_p0);
  const bool direct = log_scale == 0.0 && std::isnormal(p0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (direct) {
      masses[i] = p0 * v;
      scaled[i] = v;
    } else if (v > 0.0) {
      const double log_v = std::log(v);
      masses[i] = std::exp(log_p0 + log_scale + log_v);
      scaled[i] = std::exp(log_scale + log_v);
    } else {
      masses[i] = 0.0;
      scaled[i] = 0.0;
    }
  }
  scaled[0] = 1.0;
  return PmfVector(std::move(masses), std::move(scaled));
}

void maybe_rescale(std::vector<double>& values, std::size_t upto, double& log_scale) {
  if (values[upto] > kRescaleAbove) {
    for (std::size_t i = 0; i <= upto; ++i) {
      values[i] *= kRescaleFactor;
    }
    log_scale += kLogRescale;
  }
}

PmfVector negative_binomial_pmf(const params::NegativeBinomial& nb, std::size_t n) {
  const double log_p0 = nb.k * std::log(nb.p);
  const double q = nb.q();
  std::vector<double> values(n);
  values[0] = 1.0;
  double log_scale = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double di = static_cast<double>(i);
    values[i] = values[i - 1] * q * (di - 1.0 + nb.k) / di;
    maybe_rescale(values, i, log_scale);
  }
  return assemble(log_p0, values, log_scale);
}

double log_binomial_coefficient(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::string_view family_token(Family family) {
  for (const auto& [f, token] : kFamilyTokens) {
    if (f == family) {
      return token;
    }
  }
  return "unknown";
}

Family parse_family(std::string_view token) {
  for (const auto& [f, t] : kFamilyTokens) {
    if (t == token) {
      return f;
    }
  }
  throw DomainError(fmt::format("unknown distribution family '{}'", token));
}

DistributionSpec::DistributionSpec(params::Poisson p) : params_(p) {
  require_rate(p.lambda, "lambda");
}

DistributionSpec::DistributionSpec(params::NeymanTypeA p) : params_(p) {
  require_rate(p.lambda, "lambda");
  require_rate(p.phi, "phi");
}

DistributionSpec::DistributionSpec(params::PoissonBinomial p) : params_(p) {
  require_rate(p.lambda, "lambda");
  require_index(p.k);
  require_probability(p.p, "p");
}

DistributionSpec::DistributionSpec(params::PoissonPascal p) : params_(p) {
  require_rate(p.lambda, "Lambda");
  require_index(p.k);
  require_rate(p.P, "P");
}

DistributionSpec::DistributionSpec(params::GeometricPoisson p) : params_(p) {
  require_rate(p.lambda, "lambda");
  require_probability(p.p, "p");
}

DistributionSpec::DistributionSpec(params::NegativeBinomial p) : params_(p) {
  require_rate(p.k, "k");
  require_probability(p.p, "p");
}

Family DistributionSpec::family() const {
  return static_cast<Family>(params_.index());
}

std::vector<std::pair<std::string, double>> DistributionSpec::named_params() const {
  struct Visitor {
    std::vector<std::pair<std::string, double>> operator()(const params::Poisson& d) const {
      return {{"lambda", d.lambda}};
    }
    std::vector<std::pair<std::string, double>> operator()(const params::NeymanTypeA& d) const {
      return {{"lambda", d.lambda}, {"phi", d.phi}};
    }
    std::vector<std::pair<std::string, double>> operator()(
        const params::PoissonBinomial& d) const {
      return {{"lambda", d.lambda}, {"k", d.k}, {"p", d.p}};
    }
    std::vector<std::pair<std::string, double>> operator()(const params::PoissonPascal& d) const {
      return {{"Lambda", d.lambda}, {"k", d.k}, {"P", d.P}, {"Q", d.Q()}};
    }
    std::vector<std::pair<std::string, double>> operator()(
        const params::GeometricPoisson& d) const {
      return {{"lambda", d.lambda}, {"p", d.p}};
    }
    std::vector<std::pair<std::string, double>> operator()(
        const params::NegativeBinomial& d) const {
      return {{"k", d.k}, {"p", d.p}};
    }
  };
  return std::visit(Visitor{}, params_);
}

std::string DistributionSpec::describe() const {
  std::string out(family_token(family()));
  out += '(';
  bool first = true;
  for (const auto& [name, value] : named_params()) {
    if (!first) {
      out += ", ";
    }
    first = false;
    out += fmt::format("{}={:.6g}", name, value);
  }
  out += ')';
  return out;
}

PmfVector::PmfVector(std::vector<double> masses, std::vector<double> scaled)
    : masses_(std::move(masses)), scaled_(std::move(scaled)) {
  require(!masses_.empty(), "pmf must hold at least one mass");
  require(masses_.size() == scaled_.size(), "pmf and scaled pmf lengths differ");
  require(scaled_[0] == 1.0, "scaled pmf must start at h_0 = 1");
  for (double m : masses_) {
    require(m >= 0.0, "pmf masses must be non-negative");
  }
}

double PmfVector::total_mass() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

GeneralizerPmf generalizer_pmf(const DistributionSpec& spec, std::size_t n) {
  require(n >= 1, "truncation length must be positive");
  GeneralizerPmf g;
  g.masses.assign(n, 0.0);
  switch (spec.family()) {
    case Family::Poisson: {
      if (n > 1) {
        g.masses[1] = 1.0;
      }
      g.complete = n > 1;
      break;
    }
    case Family::NeymanTypeA: {
      const double phi = spec.as<params::NeymanTypeA>().phi;
      const double log_phi = std::log(phi);
      for (std::size_t j = 0; j < n; ++j) {
        const double dj = static_cast<double>(j);
        g.masses[j] = std::exp(-phi + dj * log_phi - std::lgamma(dj + 1.0));
      }
      break;
    }
    case Family::PoissonBinomial: {
      const auto& d = spec.as<params::PoissonBinomial>();
      const double log_p = std::log(d.p);
      const double log_q = std::log1p(-d.p);
      const std::size_t last = std::min<std::size_t>(n - 1, static_cast<std::size_t>(d.k));
      for (std::size_t j = 0; j <= last; ++j) {
        const double dj = static_cast<double>(j);
        g.masses[j] =
            std::exp(log_binomial_coefficient(d.k, dj) + dj * log_p + (d.k - dj) * log_q);
      }
      g.complete = n > static_cast<std::size_t>(d.k);
      break;
    }
    case Family::PoissonPascal: {
      const auto& d = spec.as<params::PoissonPascal>();
      const double log_ratio = std::log(d.P / d.Q());
      const double log_q = std::log(d.Q());
      const double lgamma_k = std::lgamma(static_cast<double>(d.k));
      for (std::size_t j = 0; j < n; ++j) {
        const double dj = static_cast<double>(j);
        g.masses[j] = std::exp(std::lgamma(d.k + dj) - lgamma_k - std::lgamma(dj + 1.0) +
                               dj * log_ratio - d.k * log_q);
      }
      break;
    }
    case Family::GeometricPoisson: {
      const auto& d = spec.as<params::GeometricPoisson>();
      const double log_p = std::log(d.p);
      const double log_q = std::log(d.q());
      for (std::size_t j = 1; j < n; ++j) {
        g.masses[j] = std::exp(log_q + static_cast<double>(j - 1) * log_p);
      }
      break;
    }
    case Family::NegativeBinomial:
      throw DomainError("negative binomial has no generalizer in this construction");
  }
  return g;
}

PmfVector compound_pmf(double lambda, const GeneralizerPmf& generalizer, std::size_t n) {
  require_rate(lambda, "lambda");
  require(n >= 1, "truncation length must be positive");
  const auto& b = generalizer.masses;
  require(!b.empty(), "generalizer pmf is empty");
  double total = 0.0;
  for (double bj : b) {
    require(std::isfinite(bj) && bj >= 0.0, "generalizer masses must be finite and non-negative");
    total += bj;
  }
  constexpr double kNormTolerance = 1e-9;
  require(total <= 1.0 + kNormTolerance, "generalizer masses sum to more than one");
  if (generalizer.complete) {
    require(std::abs(total - 1.0) <= kNormTolerance, "complete generalizer is not normalized");
  } else {
    require(b.size() >= n, "truncated generalizer is shorter than the requested pmf");
  }

  // Only b_1..b_last contribute; trailing exact zeros (underflow or finite
  // support) are skipped.
  std::size_t last = std::min(b.size(), n) - 1;
  while (last > 0 && b[last] == 0.0) {
    --last;
  }
  std::vector<double> weighted(last + 1);
  for (std::size_t j = 1; j <= last; ++j) {
    weighted[j] = static_cast<double>(j) * b[j];
  }

  const double log_p0 = -lambda * (1.0 - b[0]);
  std::vector<double> values(n, 0.0);
  values[0] = 1.0;
  double log_scale = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t upper = std::min(i, last);
    double sum = 0.0;
    for (std::size_t j = 1; j <= upper; ++j) {
      sum += weighted[j] * values[i - j];
    }
    values[i] = lambda * sum / static_cast<double>(i);
    maybe_rescale(values, i, log_scale);
  }
  return assemble(log_p0, values, log_scale);
}

PmfVector family_pmf(const DistributionSpec& spec, std::size_t n) {
  require(n >= 1, "truncation length must be positive");
  switch (spec.family()) {
    case Family::NegativeBinomial:
      return negative_binomial_pmf(spec.as<params::NegativeBinomial>(), n);
    case Family::Poisson:
      return compound_pmf(spec.as<params::Poisson>().lambda, generalizer_pmf(spec, n), n);
    case Family::NeymanTypeA:
      return compound_pmf(spec.as<params::NeymanTypeA>().lambda, generalizer_pmf(spec, n), n);
    case Family::PoissonBinomial:
      return compound_pmf(spec.as<params::PoissonBinomial>().lambda, generalizer_pmf(spec, n),
                          n);
    case Family::PoissonPascal:
      return compound_pmf(spec.as<params::PoissonPascal>().lambda, generalizer_pmf(spec, n), n);
    case Family::GeometricPoisson:
      return compound_pmf(spec.as<params::GeometricPoisson>().lambda, generalizer_pmf(spec, n),
                          n);
  }
  throw DomainError("unhandled family");
}

PmfVector family_pmf(const DistributionSpec& spec) {
  for (std::size_t n = kMinTruncation;; n *= 2) {
    PmfVector pmf = family_pmf(spec, n);
    if (n >= kMaxTruncation || 1.0 - pmf.total_mass() < kTailTolerance) {
      return pmf;
    }
  }
}

Moments moments(const DistributionSpec& spec) {
  switch (spec.family()) {
    case Family::Poisson: {
      const double lambda = spec.as<params::Poisson>().lambda;
      return {lambda, lambda};
    }
    case Family::NeymanTypeA: {
      const auto& d = spec.as<params::NeymanTypeA>();
      const double mean = d.lambda * d.phi;
      return {mean, mean * (1.0 + d.phi)};
    }
    case Family::PoissonBinomial: {
      const auto& d = spec.as<params::PoissonBinomial>();
      const double kp = d.k * d.p;
      return {d.lambda * kp, d.lambda * kp * (kp + d.q())};
    }
    case Family::PoissonPascal: {
      const auto& d = spec.as<params::PoissonPascal>();
      const double kP = d.k * d.P;
      return {d.lambda * kP, d.lambda * kP * (kP + d.Q())};
    }
    case Family::GeometricPoisson: {
      const auto& d = spec.as<params::GeometricPoisson>();
      const double q = d.q();
      return {d.lambda / q, d.lambda * (1.0 + d.p) / (q * q)};
    }
    case Family::NegativeBinomial: {
      const auto& d = spec.as<params::NegativeBinomial>();
      const double kq = d.k * d.q();
      return {kq / d.p, kq / (d.p * d.p)};
    }
  }
  throw DomainError("unhandled family");
}

params::PoissonPascal geometric_to_pascal(const params::GeometricPoisson& geometric) {
  require_rate(geometric.lambda, "lambda");
  require_probability(geometric.p, "p");
  // p = P / Q with Q = 1 + P  =>  P = p / q;  lambda = Lambda p.
  return {geometric.lambda / geometric.p, 1, geometric.p / geometric.q()};
}

params::GeometricPoisson pascal_to_geometric(const params::PoissonPascal& pascal) {
  require_rate(pascal.lambda, "Lambda");
  require_rate(pascal.P, "P");
  if (pascal.k != 1) {
    throw DomainError(fmt::format("geometric mapping requires k = 1, got {}", pascal.k));
  }
  const double Q = pascal.Q();
  return {pascal.lambda * pascal.P / Q, pascal.P / Q};
}

}  // namespace cpfit
