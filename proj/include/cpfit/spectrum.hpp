#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cpfit/distribution.hpp"
#include "cpfit/histogram.hpp"

namespace cpfit {

inline constexpr std::size_t kDefaultDftLength = 1024;
inline constexpr unsigned kDefaultAliasMax = 3;

/// Cosine and sine partial sums
///   a_j = sum_n w_n cos(2 pi j n / N),  b_j = sum_n w_n sin(2 pi j n / N)
/// for j = 0..N-1, with the weights zero-padded to N.
struct DftSums {
  std::vector<double> a;
  std::vector<double> b;
};

DftSums dft_sums(std::span<const double> weights, std::size_t n_dft);

/// Normalized power spectrum Psi(nu_j) = (a_j^2 + b_j^2) / a_0^2 at nu_j = j / N.
///
/// Psi(0) == 1 and Psi(nu_j) == Psi(nu_{N-j}) hold exactly: the upper half is
/// filled by mirroring the lower half.
class PowerSpectrum {
 public:
  PowerSpectrum(std::vector<double> psi, double a0);

  std::size_t n_dft() const { return psi_.size(); }
  std::span<const double> psi() const { return psi_; }
  double operator[](std::size_t j) const { return psi_[j]; }
  double nu(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(n_dft()); }
  /// a(0) before normalization (the total weight).
  double a0() const { return a0_; }

 private:
  std::vector<double> psi_;
  double a0_;
};

/// Weights must be non-negative, not all zero, and no longer than n_dft.
PowerSpectrum power_spectrum(std::span<const double> weights,
                             std::size_t n_dft = kDefaultDftLength);

/// Model spectrum from the first n_dft masses of a pmf.
PowerSpectrum power_spectrum(const PmfVector& pmf, std::size_t n_dft = kDefaultDftLength);

/// Empirical spectrum with weights c_n / N_c.
PowerSpectrum power_spectrum(const CountHistogram& histogram,
                             std::size_t n_dft = kDefaultDftLength);

enum class PeakSource { LocalMax, Mirror, Endpoint };

/// A spectral feature interpreted as an estimate of the generalizer mean
/// E[B] = 1 / (nu + m), m being the alias branch.
struct PeakCandidate {
  std::size_t grid_index;  ///< j, with nu = j / n_dft; j == n_dft for the endpoint nu = 1
  double nu;
  unsigned alias_m;
  double generalizer_mean;
  PeakSource source;

  bool operator==(const PeakCandidate&) const = default;
};

/// Local maxima of Psi on 0 < j <= N/2 (plateaus report their first index),
/// each with its mirror branch 1 - nu, plus the endpoint nu = 1 that carries
/// the global maximum at nu = 0. Sorted by ascending nu; alias_m = 0.
/// A maximum exactly at nu = 1/2 is its own mirror and is reported once.
std::vector<PeakCandidate> find_peaks(const PowerSpectrum& spectrum);

/// Expands each candidate into alias branches m = 0..m_max with
/// generalizer_mean = 1 / (nu + m), ordered by (nu, m).
std::vector<PeakCandidate> candidate_means(std::span<const PeakCandidate> peaks,
                                           unsigned m_max = kDefaultAliasMax);

}  // namespace cpfit
