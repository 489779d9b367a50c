#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cpfit {

enum class Family {
  Poisson,
  NeymanTypeA,
  PoissonBinomial,
  PoissonPascal,
  GeometricPoisson,
  NegativeBinomial,
};

/// Short token used on the command line and in reports
/// (poisson, neyman, pbinom, pascal, geom, negbinom).
std::string_view family_token(Family family);

/// Inverse of family_token; throws DomainError for an unknown token.
Family parse_family(std::string_view token);

namespace params {

struct Poisson {
  double lambda;

  bool operator==(const Poisson&) const = default;
};

/// Poisson(lambda) compounded with Poisson(phi).
struct NeymanTypeA {
  double lambda;
  double phi;

  bool operator==(const NeymanTypeA&) const = default;
};

/// Poisson(lambda) compounded with Binomial(k, p).
struct PoissonBinomial {
  double lambda;
  int k;
  double p;
  double q() const { return 1.0 - p; }

  bool operator==(const PoissonBinomial&) const = default;
};

/// Poisson(lambda) compounded with a negative binomial of index k.
/// P > 0 and Q = 1 + P are not probabilities.
struct PoissonPascal {
  double lambda;
  int k;
  double P;
  double Q() const { return 1.0 + P; }

  bool operator==(const PoissonPascal&) const = default;
};

/// Poisson(lambda) compounded with the geometric law b_j = q p^(j-1), j >= 1.
struct GeometricPoisson {
  double lambda;
  double p;
  double q() const { return 1.0 - p; }

  bool operator==(const GeometricPoisson&) const = default;
};

/// Negative binomial with real index k: P_n = C(n+k-1, n) p^k q^n.
struct NegativeBinomial {
  double k;
  double p;
  double q() const { return 1.0 - p; }

  bool operator==(const NegativeBinomial&) const = default;
};

}  // namespace params

/// A validated distribution family together with its parameters.
///
/// Construction rejects rates <= 0, probabilities outside (0, 1) and
/// non-positive integer indices with DomainError, so every instance that
/// exists satisfies the family's parameter domain.
class DistributionSpec {
 public:
  using Params = std::variant<params::Poisson, params::NeymanTypeA, params::PoissonBinomial,
                              params::PoissonPascal, params::GeometricPoisson,
                              params::NegativeBinomial>;

  explicit DistributionSpec(params::Poisson p);
  explicit DistributionSpec(params::NeymanTypeA p);
  explicit DistributionSpec(params::PoissonBinomial p);
  explicit DistributionSpec(params::PoissonPascal p);
  explicit DistributionSpec(params::GeometricPoisson p);
  explicit DistributionSpec(params::NegativeBinomial p);

  Family family() const;
  const Params& params() const { return params_; }

  template <class T>
  const T& as() const {
    return std::get<T>(params_);
  }

  /// Parameter names and values in a fixed per-family order.
  std::vector<std::pair<std::string, double>> named_params() const;

  /// e.g. "neyman(lambda=2.114, phi=0.6623)".
  std::string describe() const;

  bool operator==(const DistributionSpec&) const = default;

 private:
  Params params_;
};

/// Truncated probability masses P_0..P_{N-1} and the scaled form h_n = P_n / P_0.
class PmfVector {
 public:
  PmfVector(std::vector<double> masses, std::vector<double> scaled);

  std::span<const double> masses() const { return masses_; }
  std::span<const double> scaled() const { return scaled_; }
  std::size_t size() const { return masses_.size(); }
  double operator[](std::size_t n) const { return masses_[n]; }
  double total_mass() const;

 private:
  std::vector<double> masses_;
  std::vector<double> scaled_;
};

/// Pmf b_0..b_{N-1} of the inner ("generalizer") distribution of a compound family.
struct GeneralizerPmf {
  std::vector<double> masses;
  /// True when the whole support lies inside the stored range, so the
  /// masses must sum to one.
  bool complete = false;
};

struct Moments {
  double mean;
  double variance;
};

inline constexpr std::size_t kMinTruncation = 64;
inline constexpr std::size_t kMaxTruncation = std::size_t{1} << 16;
inline constexpr double kTailTolerance = 1e-10;

/// Generalizer of a compound family: point mass at 1 (Poisson), Poisson(phi)
/// (Neyman Type A), Binomial(k, p), negative binomial (k, P) or geometric on
/// j >= 1. NegativeBinomial is not built by compounding and is rejected.
GeneralizerPmf generalizer_pmf(const DistributionSpec& spec, std::size_t n);

/// Compound Poisson pmf by the recursion
///   P_0 = exp(lambda (b_0 - 1)),  n P_n = lambda * sum_{j=1..n} j b_j P_{n-j}.
/// The recursion runs on h_n with a running log scale so that large rates do
/// not underflow P_0 or overflow h_n.
PmfVector compound_pmf(double lambda, const GeneralizerPmf& generalizer, std::size_t n);

/// Pmf of the family truncated to n terms.
PmfVector family_pmf(const DistributionSpec& spec, std::size_t n);

/// Pmf truncated to the smallest power of two >= kMinTruncation whose tail
/// mass is below kTailTolerance (at most kMaxTruncation terms).
PmfVector family_pmf(const DistributionSpec& spec);

Moments moments(const DistributionSpec& spec);

/// (lambda, p)_geometric -> (Lambda, k = 1, P) with
/// lambda = Lambda P / Q, p = P / Q, q = 1 / Q.
params::PoissonPascal geometric_to_pascal(const params::GeometricPoisson& geometric);

/// Inverse of geometric_to_pascal; requires k == 1.
params::GeometricPoisson pascal_to_geometric(const params::PoissonPascal& pascal);

}  // namespace cpfit
