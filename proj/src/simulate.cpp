#include "cpfit/simulate.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "cpfit/error.hpp"

namespace cpfit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  std::int64_t poisson(double rate) {
    return rate < 10.0 ? poisson_inversion(rate) : poisson_ptrs(rate);
  }

  std::int64_t binomial(int k, double p) {
    if (p > 0.5) {
      return k - binomial(k, 1.0 - p);
    }
    const double q = 1.0 - p;
    double mass = std::pow(q, k);
    if (mass == 0.0) {
      std::int64_t successes = 0;
      for (int i = 0; i < k; ++i) {
        successes += uniform() < p ? 1 : 0;
      }
      return successes;
    }
    const double u = uniform();
    double cumulative = mass;
    std::int64_t x = 0;
    const double ratio = p / q;
    while (u >= cumulative && x < k) {
      mass *= ratio * static_cast<double>(k - x) / static_cast<double>(x + 1);
      ++x;
      cumulative += mass;
    }
    return x;
  }

  // Failures before the first success when each trial fails with probability `fail`.
  std::int64_t failures(double fail) {
    return static_cast<std::int64_t>(std::floor(std::log(uniform_open_zero()) / std::log(fail)));
  }

  // Logarithmic series law P(j) = -theta^j / (j ln(1 - theta)), j >= 1 (Kemp).
  std::int64_t logarithmic(double theta) {
    const double r = std::log1p(-theta);
    for (;;) {
      const double v = uniform();
      if (v >= theta) {
        return 1;
      }
      const double q = -std::expm1(r * uniform());
      if (v <= q * q) {
        const double x = std::floor(1.0 + std::log(v) / std::log(q));
        if (x < 1.0 || v == 0.0) {
          continue;
        }
        return static_cast<std::int64_t>(x);
      }
      return v >= q ? 1 : 2;
    }
  }

 private:
  std::int64_t poisson_inversion(double rate) {
    const double u = uniform();
    double mass = std::exp(-rate);
    double cumulative = mass;
    std::int64_t x = 0;
    while (u >= cumulative && mass > 0.0) {
      ++x;
      mass *= rate / static_cast<double>(x);
      cumulative += mass;
    }
    return x;
  }

  // Hoermann (1993), transformed rejection with squeeze.
  std::int64_t poisson_ptrs(double rate) {
    const double slam = std::sqrt(rate);
    const double loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
      if (us >= 0.07 && v <= vr) {
        return static_cast<std::int64_t>(k);
      }
      if (k < 0.0 || (us < 0.013 && v > us)) {
        continue;
      }
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          -rate + k * loglam - std::lgamma(k + 1.0)) {
        return static_cast<std::int64_t>(k);
      }
    }
  }

  std::mt19937_64 engine_;
};

std::int64_t draw(const DistributionSpec& spec, Sampler& s) {
  switch (spec.family()) {
    case Family::Poisson:
      return s.poisson(spec.as<params::Poisson>().lambda);
    case Family::NeymanTypeA: {
      const auto& d = spec.as<params::NeymanTypeA>();
      std::int64_t total = 0;
      for (std::int64_t c = s.poisson(d.lambda); c > 0; --c) {
        total += s.poisson(d.phi);
      }
      return total;
    }
    case Family::PoissonBinomial: {
      const auto& d = spec.as<params::PoissonBinomial>();
      std::int64_t total = 0;
      for (std::int64_t c = s.poisson(d.lambda); c > 0; --c) {
        total += s.binomial(d.k, d.p);
      }
      return total;
    }
    case Family::PoissonPascal: {
      const auto& d = spec.as<params::PoissonPascal>();
      const double fail = d.P / d.Q();
      std::int64_t total = 0;
      for (std::int64_t c = s.poisson(d.lambda); c > 0; --c) {
        for (int i = 0; i < d.k; ++i) {
          total += s.failures(fail);
        }
      }
      return total;
    }
    case Family::GeometricPoisson: {
      const auto& d = spec.as<params::GeometricPoisson>();
      std::int64_t total = 0;
      for (std::int64_t c = s.poisson(d.lambda); c > 0; --c) {
        total += 1 + s.failures(d.p);
      }
      return total;
    }
    case Family::NegativeBinomial: {
      const auto& d = spec.as<params::NegativeBinomial>();
      std::int64_t total = 0;
      for (std::int64_t c = s.poisson(-d.k * std::log(d.p)); c > 0; --c) {
        total += s.logarithmic(d.q());
      }
      return total;
    }
  }
  throw DomainError("unhandled family");
}

}  // namespace

CountHistogram simulate(const DistributionSpec& spec, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) {
    throw DomainError("at least one sample is required");
  }
  std::vector<std::int64_t> counts;
  // Blocks are independent streams; they could be drawn concurrently and
  // merged without changing the histogram.
  for (std::size_t start = 0, block = 0; start < n_samples; start += kSimulationBlock, ++block) {
    Sampler sampler(splitmix64(seed + (block + 1) * 0x9E3779B97F4A7C15ULL));
    const std::size_t end = std::min(n_samples, start + kSimulationBlock);
    for (std::size_t i = start; i < end; ++i) {
      const auto x = static_cast<std::size_t>(draw(spec, sampler));
      if (x >= counts.size()) {
        counts.resize(x + 1, 0);
      }
      ++counts[x];
    }
  }
  return CountHistogram(std::move(counts), "simulated",
                        fmt::format("simulate {} n={} seed={} rng={}", spec.describe(), n_samples,
                                    seed, kRngAlgorithm));
}

}  // namespace cpfit
