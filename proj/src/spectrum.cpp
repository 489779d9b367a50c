#include "cpfit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

#include "cpfit/error.hpp"

namespace cpfit {

namespace {

// The FFTW planner is not re-entrant; fftw_execute is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealForwardPlan {
 public:
  RealForwardPlan(std::vector<double>& in, std::vector<std::complex<double>>& out) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(in.size()), in.data(),
                                 reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  ~RealForwardPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealForwardPlan(const RealForwardPlan&) = delete;
  RealForwardPlan& operator=(const RealForwardPlan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

void validate_weights(std::span<const double> weights, std::size_t n_dft) {
  if (n_dft < 2) {
    throw DomainError(fmt::format("DFT length must be at least 2, got {}", n_dft));
  }
  if (weights.empty()) {
    throw DataError("DFT weights are empty");
  }
  if (weights.size() > n_dft) {
    throw DataError(
        fmt::format("{} weights do not fit in a DFT of length {}", weights.size(), n_dft));
  }
}

}  // namespace

DftSums dft_sums(std::span<const double> weights, std::size_t n_dft) {
  validate_weights(weights, n_dft);
  std::vector<double> in(n_dft, 0.0);
  std::vector<std::complex<double>> out(n_dft / 2 + 1);
  {
    RealForwardPlan plan(in, out);
    std::copy(weights.begin(), weights.end(), in.begin());
    plan.execute();
  }

  // Forward transform is sum w_n exp(-2 pi i j n / N) = a_j - i b_j.
  DftSums sums{std::vector<double>(n_dft), std::vector<double>(n_dft)};
  for (std::size_t j = 0; j < out.size(); ++j) {
    sums.a[j] = out[j].real();
    sums.b[j] = -out[j].imag();
  }
  sums.b[0] = 0.0;
  if (n_dft % 2 == 0) {
    sums.b[n_dft / 2] = 0.0;
  }
  for (std::size_t j = out.size(); j < n_dft; ++j) {
    sums.a[j] = sums.a[n_dft - j];
    sums.b[j] = -sums.b[n_dft - j];
  }
  return sums;
}

PowerSpectrum::PowerSpectrum(std::vector<double> psi, double a0)
    : psi_(std::move(psi)), a0_(a0) {
  if (psi_.size() < 2) {
    throw DomainError("power spectrum needs at least two grid points");
  }
}

PowerSpectrum power_spectrum(std::span<const double> weights, std::size_t n_dft) {
  validate_weights(weights, n_dft);
  double total = 0.0;
  for (double w : weights) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      throw DataError("spectrum weights must be finite and non-negative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw DataError("spectrum weights are all zero");
  }

  const DftSums sums = dft_sums(weights, n_dft);
  const double a0 = sums.a[0];
  const double norm = a0 * a0;
  std::vector<double> psi(n_dft);
  const std::size_t half = n_dft / 2;
  for (std::size_t j = 0; j <= half; ++j) {
    psi[j] = (sums.a[j] * sums.a[j] + sums.b[j] * sums.b[j]) / norm;
  }
  for (std::size_t j = half + 1; j < n_dft; ++j) {
    psi[j] = psi[n_dft - j];
  }
  psi[0] = 1.0;
  return PowerSpectrum(std::move(psi), a0);
}

PowerSpectrum power_spectrum(const PmfVector& pmf, std::size_t n_dft) {
  const auto masses = pmf.masses();
  return power_spectrum(masses.first(std::min(masses.size(), n_dft)), n_dft);
}

PowerSpectrum power_spectrum(const CountHistogram& histogram, std::size_t n_dft) {
  const std::size_t used = histogram.last_nonzero() + 1;
  if (used > n_dft) {
    throw DataError(
        fmt::format("histogram spans {} bins, more than the DFT length {}", used, n_dft));
  }
  const double total = static_cast<double>(histogram.total());
  std::vector<double> weights(used);
  for (std::size_t n = 0; n < used; ++n) {
    weights[n] = static_cast<double>(histogram[n]) / total;
  }
  return power_spectrum(weights, n_dft);
}

std::vector<PeakCandidate> find_peaks(const PowerSpectrum& spectrum) {
  const std::size_t n = spectrum.n_dft();
  const auto psi = spectrum.psi();
  const double dn = static_cast<double>(n);
  std::vector<PeakCandidate> peaks;

  std::size_t j = 1;
  while (2 * j <= n) {
    if (psi[j] > psi[j - 1]) {
      std::size_t end = j;
      while (end + 1 < n && psi[end + 1] == psi[j]) {
        ++end;
      }
      if (end + 1 < n && psi[end + 1] < psi[j]) {
        const double nu = static_cast<double>(j) / dn;
        peaks.push_back({j, nu, 0, 1.0 / nu, PeakSource::LocalMax});
        if (2 * j != n) {
          const double mirror = static_cast<double>(n - j) / dn;
          peaks.push_back({n - j, mirror, 0, 1.0 / mirror, PeakSource::Mirror});
        }
      }
      j = end + 1;
    } else {
      ++j;
    }
  }
  peaks.push_back({n, 1.0, 0, 1.0, PeakSource::Endpoint});

  std::sort(peaks.begin(), peaks.end(),
            [](const PeakCandidate& x, const PeakCandidate& y) { return x.grid_index < y.grid_index; });
  return peaks;
}

std::vector<PeakCandidate> candidate_means(std::span<const PeakCandidate> peaks, unsigned m_max) {
  std::vector<PeakCandidate> out;
  out.reserve(peaks.size() * (m_max + 1));
  for (const auto& peak : peaks) {
    for (unsigned m = 0; m <= m_max; ++m) {
      PeakCandidate c = peak;
      c.alias_m = m;
      c.generalizer_mean = 1.0 / (peak.nu + static_cast<double>(m));
      out.push_back(c);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PeakCandidate& x, const PeakCandidate& y) {
    if (x.nu != y.nu) {
      return x.nu < y.nu;
    }
    return x.alias_m < y.alias_m;
  });
  return out;
}

}  // namespace cpfit
