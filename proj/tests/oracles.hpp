#pragma once

// Brute-force reference implementations used only by the tests. None of
// them share code with the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

struct Dft {
  std::vector<double> a;
  std::vector<double> b;
};

// a_j = sum_n w_n cos(2 pi j n / N), b_j = sum_n w_n sin(2 pi j n / N).
inline Dft naive_dft(const std::vector<double>& w, std::size_t n_dft) {
  Dft d{std::vector<double>(n_dft, 0.0), std::vector<double>(n_dft, 0.0)};
  for (std::size_t j = 0; j < n_dft; ++j) {
    for (std::size_t n = 0; n < w.size(); ++n) {
      // Reduce j*n mod N first so the angle stays small and exact.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * n) % n_dft) /
                           static_cast<double>(n_dft);
      d.a[j] += w[n] * std::cos(angle);
      d.b[j] += w[n] * std::sin(angle);
    }
  }
  return d;
}

inline std::vector<double> poisson_pmf(double rate, std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    p[i] = std::exp(x * std::log(rate) - rate - std::lgamma(x + 1.0));
  }
  return p;
}

inline std::vector<double> binomial_pmf(int k, double p, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n && static_cast<int>(i) <= k; ++i) {
    const double x = static_cast<double>(i);
    out[i] = std::exp(std::lgamma(k + 1.0) - std::lgamma(x + 1.0) - std::lgamma(k - x + 1.0) +
                      x * std::log(p) + (k - x) * std::log1p(-p));
  }
  return out;
}

// Number of failures before the k-th success, failure probability f.
inline std::vector<double> pascal_pmf(double k, double f, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    out[i] = std::exp(std::lgamma(k + x) - std::lgamma(k) - std::lgamma(x + 1.0) +
                      x * std::log(f) + k * std::log1p(-f));
  }
  return out;
}

// Compound pmf as a Poisson mixture of convolution powers of b:
// P_n = sum_c e^{-lambda} lambda^c / c! (b^{*c})_n, summed until the
// Poisson weights are negligible.
inline std::vector<double> mixture_pmf(double lambda, const std::vector<double>& b, std::size_t n) {
  std::vector<double> power(n, 0.0);
  power[0] = 1.0;
  std::vector<double> out(n, 0.0);
  const std::size_t c_max =
      static_cast<std::size_t>(lambda + 12.0 * std::sqrt(lambda) + 40.0);
  for (std::size_t c = 0; c <= c_max; ++c) {
    const double weight = std::exp(static_cast<double>(c) * std::log(lambda) - lambda -
                                   std::lgamma(static_cast<double>(c) + 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += weight * power[i];
    }
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (power[i] == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < b.size() && i + j < n; ++j) {
        next[i + j] += power[i] * b[j];
      }
    }
    power.swap(next);
  }
  return out;
}

struct Summed {
  double mass;
  double mean;
  double variance;
};

inline Summed summed_moments(const std::vector<double>& p) {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m0 += p[i];
    m1 += static_cast<double>(i) * p[i];
  }
  const double mean = m1 / m0;
  double var = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(i) - mean;
    var += d * d * p[i];
  }
  return {m0, mean, var / m0};
}

}  // namespace oracle
