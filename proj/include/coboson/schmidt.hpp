// Schmidt-coefficient distributions: construction, summaries, and the
// feasible (purity, largest-coefficient) region.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coboson/errors.hpp"
#include "coboson/log_domain.hpp"

namespace coboson {

inline constexpr double kNormTol = 1e-12;        // |sum - 1| tolerance
inline constexpr double kCoeffClampTol = 1e-15;  // tiny negatives clamped to 0
inline constexpr double kBoundaryFlagTol = 1e-9;

// Compensated summation: long vectors of small weights must not trip the
// 1e-12 normalization check through bare accumulation error.
inline double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Probability weights of the Schmidt modes, kept sorted non-increasing.
// Every coefficient is >= 0 and the vector sums to 1 within kNormTol.
class SchmidtDistribution {
 public:
  explicit SchmidtDistribution(std::vector<double> raw, bool renormalize = false)
      : coeffs_(std::move(raw)) {
    if (coeffs_.empty()) throw EmptyInput("SchmidtDistribution: empty coefficient list");
    for (double& c : coeffs_) {
      if (std::isnan(c) || c < -kCoeffClampTol)
        throw NegativeCoefficient("SchmidtDistribution: coefficient " + std::to_string(c));
      if (c < 0.0) c = 0.0;
    }
    std::stable_sort(coeffs_.begin(), coeffs_.end(), std::greater<double>());
    const double sum = kahan_sum(coeffs_);
    if (renormalize) {
      if (sum <= 0.0) throw NotNormalized("SchmidtDistribution: zero total weight");
      for (double& c : coeffs_) c /= sum;
    } else if (std::abs(sum - 1.0) > kNormTol) {
      throw NotNormalized("SchmidtDistribution: sum = " + std::to_string(sum));
    }
  }

  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t j) const { return coeffs_[j]; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double lambda1() const { return coeffs_.front(); }

  std::size_t positive_count() const {
    return static_cast<std::size_t>(
        std::count_if(coeffs_.begin(), coeffs_.end(), [](double c) { return c > 0.0; }));
  }

 private:
  std::vector<double> coeffs_;
};

inline SchmidtDistribution make_distribution(std::vector<double> raw, bool renormalize = false) {
  return SchmidtDistribution(std::move(raw), renormalize);
}

struct DistributionSummary {
  double lambda1 = 0.0;
  double purity = 0.0;                  // M(2)
  std::vector<double> power_sums;       // power_sums[k-1] = M(k), k = 1..kmax
  double schmidt_number = 0.0;          // K = 1/P
  double geometric_entanglement = 0.0;  // E_G = 1 - lambda1
  // set when lambda1 sits within kBoundaryFlagTol of a feasibility edge
  std::optional<std::string> boundary;
};

inline double lambda1_min(double P);  // forward, used by summarize's boundary note

inline DistributionSummary summarize(const SchmidtDistribution& dist, std::int64_t kmax) {
  if (kmax < 2) throw OutOfRange("summarize: kmax must be >= 2");
  DistributionSummary s;
  s.lambda1 = dist.lambda1();
  s.power_sums.resize(static_cast<std::size_t>(kmax));
  std::vector<double> pw(dist.size(), 1.0);
  for (std::int64_t k = 1; k <= kmax; ++k) {
    double acc = 0.0, comp = 0.0;  // compensated: M(1) must hold 1 to 1e-12 at any S
    for (std::size_t j = 0; j < dist.size(); ++j) {
      pw[j] *= dist[j];
      const double y = pw[j] - comp;
      const double t = acc + y;
      comp = (t - acc) - y;
      acc = t;
    }
    s.power_sums[static_cast<std::size_t>(k - 1)] = acc;
  }
  s.purity = s.power_sums[1];
  s.schmidt_number = 1.0 / s.purity;
  s.geometric_entanglement = 1.0 - s.lambda1;
  if (std::abs(s.lambda1 - std::sqrt(s.purity)) <= kBoundaryFlagTol)
    s.boundary = "lambda1_max";
  else if (std::abs(s.lambda1 - lambda1_min(s.purity)) <= kBoundaryFlagTol)
    s.boundary = "lambda1_min";
  return s;
}

// Smallest admissible largest coefficient for purity P:
// (1/ceil(1/P)) (sqrt((P ceil(1/P) - 1)/(ceil(1/P) - 1)) + 1).
inline double lambda1_min(double P) {
  if (!(P > 0.0) || P > 1.0) throw OutOfRange("lambda1_min: P outside (0, 1]");
  const double L = snapped_ceil(1.0 / P);
  if (L <= 1.0) return 1.0;
  const double arg = std::max(0.0, (P * L - 1.0) / (L - 1.0));
  return (std::sqrt(arg) + 1.0) / L;
}

inline double lambda1_max(double P) {
  if (!(P > 0.0) || P > 1.0) throw OutOfRange("lambda1_max: P outside (0, 1]");
  return std::sqrt(P);
}

inline double p_min(double lambda1) {
  if (!(lambda1 > 0.0) || lambda1 > 1.0) throw OutOfRange("p_min: lambda1 outside (0, 1]");
  return lambda1 * lambda1;
}

// Largest purity hosting lambda1 as the top coefficient:
// lambda1^2 floor(1/lambda1) + (1 - lambda1 floor(1/lambda1))^2.
inline double p_max(double lambda1) {
  if (!(lambda1 > 0.0) || lambda1 > 1.0) throw OutOfRange("p_max: lambda1 outside (0, 1]");
  const double f = snapped_floor(1.0 / lambda1);
  const double rem = 1.0 - lambda1 * f;
  return lambda1 * lambda1 * f + rem * rem;
}

inline constexpr double kFeasibilityTol = 1e-12;

inline bool feasible(double P, double lambda1) {
  if (!(P > 0.0) || P > 1.0 || !(lambda1 > 0.0) || lambda1 > 1.0 + kFeasibilityTol) return false;
  return lambda1 >= lambda1_min(P) - kFeasibilityTol &&
         lambda1 <= std::sqrt(P) + kFeasibilityTol;
}

namespace detail {

// Uniform double in [0, 1) from the generator's top 53 bits; pinned here so
// output streams do not depend on the standard library's distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exponential1(std::mt19937_64& rng) { return -std::log1p(-uniform01(rng)); }

}  // namespace detail

// Uniform sample from the probability simplex, sorted non-increasing.
inline SchmidtDistribution random_distribution(std::int64_t S, std::uint64_t seed) {
  if (S < 1) throw OutOfRange("random_distribution: S must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(S));
  for (double& x : v) x = detail::exponential1(rng);
  return SchmidtDistribution(std::move(v), /*renormalize=*/true);
}

// Distribution whose summary hits (P, lambda1) within 1e-9: lambda1 is fixed,
// the tail is sampled on the simplex and its dispersion rescaled about the
// tail mean to land on the target purity; rejection keeps the tail inside
// [0, lambda1].
inline SchmidtDistribution random_distribution_constrained(double P, double lambda1,
                                                           std::int64_t S, std::uint64_t seed,
                                                           std::int64_t attempts = 1000) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("random_distribution_constrained");
  if (S < 1) throw OutOfRange("random_distribution_constrained: S must be >= 1");
  if (S == 1) {
    if (std::abs(lambda1 - 1.0) > 1e-9 || std::abs(P - 1.0) > 1e-9)
      throw InfeasiblePair("random_distribution_constrained: S = 1 forces the product state");
    return SchmidtDistribution({1.0});
  }
  const double T = 1.0 - lambda1;         // tail mass
  const double Q = P - lambda1 * lambda1; // tail sum of squares
  const auto n = static_cast<std::size_t>(S - 1);
  if (T <= kFeasibilityTol) {
    // product state up to rounding: lambda1 = 1
    std::vector<double> v(static_cast<std::size_t>(S), 0.0);
    v[0] = 1.0;
    return SchmidtDistribution(std::move(v));
  }
  const double mean = T / static_cast<double>(n);
  const double q_uniform = T * mean;  // smallest tail sum-of-squares at this S
  if (Q < q_uniform - 1e-12)
    throw InfeasiblePair("random_distribution_constrained: S too small to host (P, lambda1)");

  std::mt19937_64 rng(seed);
  std::vector<double> tail(n);
  for (std::int64_t attempt = 0; attempt < attempts; ++attempt) {
    double sum = 0.0;
    for (double& x : tail) {
      x = detail::exponential1(rng);
      sum += x;
    }
    double sq = 0.0;
    for (double& x : tail) {
      x *= T / sum;
      sq += x * x;
    }
    const double spread = sq - q_uniform;
    if (spread <= 0.0) continue;
    const double alpha = std::sqrt(std::max(0.0, Q - q_uniform) / spread);
    bool ok = true;
    std::vector<double> v;
    v.reserve(n + 1);
    v.push_back(lambda1);
    for (double x : tail) {
      const double t = mean + alpha * (x - mean);
      if (t < -kCoeffClampTol || t > lambda1 + 1e-12) {
        ok = false;
        break;
      }
      v.push_back(std::min(std::max(t, 0.0), lambda1));
    }
    if (!ok) continue;
    SchmidtDistribution dist(std::move(v));
    const auto s = summarize(dist, 2);
    if (std::abs(s.purity - P) <= 1e-9 && std::abs(s.lambda1 - lambda1) <= 1e-9) return dist;
  }
  throw SamplingExhausted("random_distribution_constrained: rejection budget exhausted");
}

}  // namespace coboson
