// Distributions extremizing chi_N at fixed (purity, largest coefficient),
// the peaked/uniform boundary families, and the three-coefficient uniforming
// and peaking operations whose fixed points they are.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coboson/chi.hpp"
#include "coboson/errors.hpp"
#include "coboson/log_domain.hpp"
#include "coboson/schmidt.hpp"

namespace coboson {

enum class ExtremalKind { MinPL1, MaxPL1, PeakedP, UniformP, PeakedL1, UniformL1 };

inline const char* to_string(ExtremalKind k) {
  switch (k) {
    case ExtremalKind::MinPL1: return "min_PL1";
    case ExtremalKind::MaxPL1: return "max_PL1";
    case ExtremalKind::PeakedP: return "peaked_P";
    case ExtremalKind::UniformP: return "uniform_P";
    case ExtremalKind::PeakedL1: return "peaked_L1";
    case ExtremalKind::UniformL1: return "uniform_L1";
  }
  return "?";
}

// Degenerate divisions below this go to the exact peaked/uniform branch
// instead of near-singular formulas.
inline constexpr double kDegenerateTol = 1e-12;
inline constexpr double kSpecCheckTol = 1e-10;

// Compact parametrization of an extremal spectrum. S = kInfinite marks the
// S -> infinity family whose tail is an infinitesimal-uniform block of total
// mass lambdaSigma; it is consumed symbolically, never materialized.
struct ExtremalSpec {
  static constexpr std::int64_t kInfinite = -1;

  ExtremalKind kind = ExtremalKind::MinPL1;
  std::int64_t S = kInfinite;
  std::int64_t L = 0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;      // MinPL1 plateau value (multiplicity S-2)
  double lambdaL = 0.0;      // MaxPL1 pivot coefficient
  double lambdaS = 0.0;      // smallest coefficient (finite kinds)
  double lambdaSigma = 0.0;  // infinitesimal tail mass (infinite kinds)

  bool infinite() const { return S == kInfinite; }
};

namespace detail {

inline void push_block(std::vector<MultiplicityBlocks::Block>& blocks, double value,
                       std::int64_t mult) {
  if (mult <= 0 || value <= 0.0) return;
  if (!blocks.empty() && blocks.back().value == value) {
    blocks.back().multiplicity += mult;
    return;
  }
  blocks.push_back({value, mult});
}

// (finite blocks, infinitesimal tail mass) realization of a spec.
inline std::pair<std::vector<MultiplicityBlocks::Block>, double> spec_blocks(
    const ExtremalSpec& spec) {
  std::vector<MultiplicityBlocks::Block> b;
  double tail = 0.0;
  switch (spec.kind) {
    case ExtremalKind::MinPL1:
      push_block(b, spec.lambda1, 1);
      push_block(b, spec.lambda2, spec.S - 2);
      push_block(b, spec.lambdaS, 1);
      break;
    case ExtremalKind::MaxPL1:
      push_block(b, spec.lambda1, spec.L - 1);
      push_block(b, spec.lambdaL, 1);
      if (spec.infinite())
        tail = spec.lambdaSigma;
      else
        push_block(b, spec.lambdaS, spec.S - spec.L);
      break;
    case ExtremalKind::PeakedP:
    case ExtremalKind::PeakedL1:
      push_block(b, spec.lambda1, 1);
      if (spec.infinite())
        tail = spec.lambdaSigma;
      else
        push_block(b, spec.lambdaS, spec.S - 1);
      break;
    case ExtremalKind::UniformP:
    case ExtremalKind::UniformL1:
      push_block(b, spec.lambda1, spec.L - 1);
      push_block(b, spec.lambdaS, 1);
      break;
  }
  return {std::move(b), tail};
}

}  // namespace detail

// chi_0..chi_Nmax of the spectrum a spec describes, via the multiplicity
// engine; infinite tails use the lambdaSigma^k/k! limit rule.
inline ChiSeries chi_of_spec(const ExtremalSpec& spec, std::int64_t n_max) {
  if (n_max < 0) throw OutOfRange("chi_of_spec: n_max must be >= 0");
  auto [blocks, tail] = detail::spec_blocks(spec);
  return detail::chi_blocks(blocks, tail, n_max, ChiSource::Multiplicity);
}

// Materialize a spec as a flat distribution. Finite specs with S <= S_cut
// expand exactly; infinite specs slice the tail mass into S_cut total modes.
inline SchmidtDistribution expand(const ExtremalSpec& spec, std::int64_t S_cut = 10000) {
  auto [blocks, tail] = detail::spec_blocks(spec);
  std::int64_t head = 0;
  for (const auto& b : blocks) head += b.multiplicity;
  std::vector<double> v;
  if (!spec.infinite() || tail <= 0.0) {
    if (head > S_cut) throw TooLarge("expand: finite spec has S > S_cut");
    for (const auto& b : blocks)
      v.insert(v.end(), static_cast<std::size_t>(b.multiplicity), b.value);
    if (v.empty()) throw EmptyInput("expand: spec has no positive coefficients");
    return SchmidtDistribution(std::move(v));
  }
  const std::int64_t n_tail = S_cut - head;
  if (n_tail < 1) throw TooLarge("expand: S_cut leaves no room for the tail");
  for (const auto& b : blocks)
    v.insert(v.end(), static_cast<std::size_t>(b.multiplicity), b.value);
  v.insert(v.end(), static_cast<std::size_t>(n_tail), tail / static_cast<double>(n_tail));
  return SchmidtDistribution(std::move(v));
}

// Consistency check: the spec's blocks reproduce mass 1 and, where the kind
// pins it, the (P, lambda1) pair, within kSpecCheckTol.
inline void validate(const ExtremalSpec& spec) {
  auto [blocks, tail] = detail::spec_blocks(spec);
  double mass = tail, purity = 0.0;
  for (const auto& b : blocks) {
    mass += b.value * static_cast<double>(b.multiplicity);
    purity += b.value * b.value * static_cast<double>(b.multiplicity);
  }
  if (std::abs(mass - 1.0) > kSpecCheckTol)
    throw OutOfRange(std::string("ExtremalSpec(") + to_string(spec.kind) +
                     "): mass deviates by " + std::to_string(mass - 1.0));
  if (!blocks.empty() && blocks.front().value > spec.lambda1 + kSpecCheckTol)
    throw OutOfRange("ExtremalSpec: a coefficient exceeds lambda1");
  (void)purity;  // per-kind purity targets are asserted by the constructors
}

// Minimizer of chi_N at fixed (P, lambda1):
// lambda1 >= lambda2 = ... = lambda_{S-1} >= lambda_S with
// S = 1 + ceil((1-lambda1)^2/(P-lambda1^2)).
inline ExtremalSpec minimizing_distribution(double P, double lambda1) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("minimizing_distribution");
  const double q = P - lambda1 * lambda1;
  if (q <= kDegenerateTol)
    throw DegeneratePeaked("minimizing_distribution: lambda1 = sqrt(P); use peaked_from_P");
  const double ratio = (1.0 - lambda1) * (1.0 - lambda1) / q;
  const double Sd = 1.0 + snapped_ceil(ratio);
  ExtremalSpec spec;
  spec.kind = ExtremalKind::MinPL1;
  spec.S = static_cast<std::int64_t>(Sd);
  spec.lambda1 = lambda1;
  if (spec.S == 2) {
    spec.lambda2 = spec.lambdaS = 1.0 - lambda1;
    if (std::abs(lambda1 * lambda1 + spec.lambdaS * spec.lambdaS - P) > kSpecCheckTol)
      throw InfeasiblePair("minimizing_distribution: S = 2 cannot host this purity");
    return spec;
  }
  // stable radical: (S-2)(lambda1(2-S lambda1)+(S-1)P-1) = (S-2) q (S-1-ratio);
  // the last factor is the ceiling slack, negative only by the integer snap
  const double frac = Sd - 1.0 - ratio;
  if (frac < -1e-6) throw InfeasiblePair("minimizing_distribution: negative radical");
  const double R = std::sqrt((Sd - 2.0) * q * std::max(frac, 0.0));
  spec.lambda2 = (1.0 - lambda1) / (Sd - 1.0) + R / ((Sd - 2.0) * (Sd - 1.0));
  spec.lambdaS = std::max(0.0, (1.0 - lambda1 - R) / (Sd - 1.0));
  return spec;
}

// Maximizer of chi_N at fixed (P, lambda1): lambda1 repeated L-1 times with
// L = ceil(P/lambda1^2), a pivot lambda_L, and a uniform tail; the default
// S = kInfinite takes the supremum with an infinitesimal tail of mass
// lambdaSigma.
inline ExtremalSpec maximizing_distribution(double P, double lambda1,
                                            std::int64_t S = ExtremalSpec::kInfinite) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("maximizing_distribution");
  const double Ld = std::max(1.0, snapped_ceil(P / (lambda1 * lambda1)));
  const auto L = static_cast<std::int64_t>(Ld);
  ExtremalSpec spec;
  spec.kind = ExtremalKind::MaxPL1;
  spec.S = S;
  spec.L = L;
  spec.lambda1 = lambda1;
  if (S == ExtremalSpec::kInfinite) {
    const double arg = std::max(0.0, P - (Ld - 1.0) * lambda1 * lambda1);
    spec.lambdaL = std::min(std::sqrt(arg), lambda1);
    spec.lambdaSigma = std::max(0.0, 1.0 - (Ld - 1.0) * lambda1 - spec.lambdaL);
    return spec;
  }
  if (S < L) throw STooSmall("maximizing_distribution: S < L");
  const double Sd = static_cast<double>(S);
  if (S == L) {
    spec.lambdaL = 1.0 - (Ld - 1.0) * lambda1;
    spec.lambdaS = 0.0;
    const double got = (Ld - 1.0) * lambda1 * lambda1 + spec.lambdaL * spec.lambdaL;
    if (std::abs(got - P) > kSpecCheckTol)
      throw STooSmall("maximizing_distribution: S = L cannot host this purity");
    return spec;
  }
  const double denom = P - (Ld - 1.0) * lambda1 * lambda1;
  const double s_min = ((Ld - 1.0) * P + 1.0 - 2.0 * (Ld - 1.0) * lambda1) / denom;
  // stable radical: the double-sum inner factor equals denom * (S - s_min)
  const double slack = Sd - s_min;
  if (slack < -1e-9 * std::max(1.0, std::abs(s_min)))
    throw STooSmall("maximizing_distribution: need S > " + std::to_string(s_min));
  const double Rp = std::sqrt((Sd - Ld) * denom * std::max(slack, 0.0));
  spec.lambdaL = (1.0 - (Ld - 1.0) * lambda1 + Rp) / (Sd + 1.0 - Ld);
  spec.lambdaS =
      std::max(0.0, (1.0 - (Ld - 1.0) * lambda1) / (Sd + 1.0 - Ld) - Rp / ((Sd - Ld) * (Sd + 1.0 - Ld)));
  if (spec.lambdaL > lambda1 + kSpecCheckTol)
    throw STooSmall("maximizing_distribution: pivot exceeds lambda1");
  spec.lambdaL = std::min(spec.lambdaL, lambda1);
  return spec;
}

// One large coefficient, uniform remainder; the chi maximizer at fixed P.
inline ExtremalSpec peaked_from_P(double P, std::int64_t S = ExtremalSpec::kInfinite) {
  if (!(P > 0.0) || P > 1.0) throw OutOfRange("peaked_from_P: P outside (0, 1]");
  ExtremalSpec spec;
  spec.kind = ExtremalKind::PeakedP;
  spec.S = S;
  if (S == ExtremalSpec::kInfinite) {
    spec.lambda1 = std::sqrt(P);
    spec.lambdaSigma = 1.0 - spec.lambda1;
    return spec;
  }
  if (S < 1) throw OutOfRange("peaked_from_P: S must be >= 1");
  const double Sd = static_cast<double>(S);
  if (S == 1) {
    if (std::abs(P - 1.0) > kSpecCheckTol) throw STooSmall("peaked_from_P: S = 1 needs P = 1");
    spec.lambda1 = 1.0;
    return spec;
  }
  const double arg = (Sd - 1.0) * (Sd * P - 1.0);
  if (arg < -kDegenerateTol) throw STooSmall("peaked_from_P: S < 1/P");
  spec.lambda1 = (1.0 + std::sqrt(std::max(arg, 0.0))) / Sd;
  spec.lambdaS = (1.0 - spec.lambda1) / (Sd - 1.0);
  return spec;
}

// ceil(1/P) coefficients at lambda1_min(P); the chi minimizer at fixed P.
inline ExtremalSpec uniform_from_P(double P) {
  if (!(P > 0.0) || P > 1.0) throw OutOfRange("uniform_from_P: P outside (0, 1]");
  ExtremalSpec spec;
  spec.kind = ExtremalKind::UniformP;
  const double Ld = snapped_ceil(1.0 / P);
  spec.L = static_cast<std::int64_t>(Ld);
  spec.S = spec.L;
  spec.lambda1 = lambda1_min(P);
  spec.lambdaS = std::max(0.0, 1.0 - spec.lambda1 * (Ld - 1.0));
  return spec;
}

// First coefficient lambda1, infinitesimal uniform tail: the chi maximizer
// once only lambda1 is known (P at its minimum lambda1^2).
inline ExtremalSpec peaked_from_lambda1(double lambda1) {
  if (!(lambda1 > 0.0) || lambda1 > 1.0) throw OutOfRange("peaked_from_lambda1");
  ExtremalSpec spec;
  spec.kind = ExtremalKind::PeakedL1;
  spec.S = ExtremalSpec::kInfinite;
  spec.lambda1 = lambda1;
  spec.lambdaSigma = 1.0 - lambda1;
  return spec;
}

// floor(1/lambda1) copies of lambda1 plus the remainder: the chi minimizer
// once only lambda1 is known (P at its maximum).
inline ExtremalSpec uniform_from_lambda1(double lambda1) {
  if (!(lambda1 > 0.0) || lambda1 > 1.0) throw OutOfRange("uniform_from_lambda1");
  ExtremalSpec spec;
  spec.kind = ExtremalKind::UniformL1;
  const double f = snapped_floor(1.0 / lambda1);
  spec.L = static_cast<std::int64_t>(f) + 1;
  spec.S = spec.L;
  spec.lambda1 = lambda1;
  spec.lambdaS = std::max(0.0, 1.0 - lambda1 * f);
  return spec;
}

namespace detail {

inline void check_triple(const SchmidtDistribution& dist, std::size_t j1, std::size_t j2,
                         std::size_t j3) {
  if (!(j1 < j2 && j2 < j3 && j3 < dist.size()))
    throw IndexOutOfRange("gamma operation: need j1 < j2 < j3 < S");
  if (j1 == 0) throw TouchesLambda1("gamma operation: never acts on lambda1");
}

inline SchmidtDistribution replace_triple(const SchmidtDistribution& dist, std::size_t j1,
                                          std::size_t j2, std::size_t j3, double a, double b,
                                          double c) {
  std::vector<double> v = dist.coefficients();
  v[j1] = a;
  v[j2] = b;
  v[j3] = c;
  return SchmidtDistribution(std::move(v));
}

}  // namespace detail

// Uniforming operation: equalizes the two larger coefficients of the triple
// while preserving K1 = sum and K2 = sum of squares (and thus the total mass
// and purity). Never increases chi_N. Indices are 0-based; j1 >= 1.
inline SchmidtDistribution gamma_uniform(const SchmidtDistribution& dist, std::size_t j1,
                                         std::size_t j2, std::size_t j3) {
  detail::check_triple(dist, j1, j2, j3);
  const double K1 = dist[j1] + dist[j2] + dist[j3];
  const double K2 = dist[j1] * dist[j1] + dist[j2] * dist[j2] + dist[j3] * dist[j3];
  if (K1 * K1 < 2.0 * K2) {
    // equal pair would force the third negative; park it at zero instead
    const double r = std::sqrt(2.0 * K2 - K1 * K1);
    return detail::replace_triple(dist, j1, j2, j3, (K1 + r) / 2.0,
                                  std::max(0.0, (K1 - r) / 2.0), 0.0);
  }
  const double d = std::sqrt(std::max(0.0, 6.0 * K2 - 2.0 * K1 * K1));
  const double pair = (2.0 * K1 + d) / 6.0;
  const double low = std::max(0.0, (K1 - d) / 3.0);
  return detail::replace_triple(dist, j1, j2, j3, pair, pair, low);
}

// Peaking operation: drives one coefficient of the triple as high as the
// current lambda1 allows while preserving K1 and K2. Never decreases chi_N.
inline SchmidtDistribution gamma_peak(const SchmidtDistribution& dist, std::size_t j1,
                                      std::size_t j2, std::size_t j3, double lambda1_cap) {
  detail::check_triple(dist, j1, j2, j3);
  const double top = std::max({dist[j1], dist[j2], dist[j3]});
  if (lambda1_cap < top - 1e-12)
    throw OutOfRange("gamma_peak: cap below a triple coefficient");
  const double K1 = dist[j1] + dist[j2] + dist[j3];
  const double K2 = dist[j1] * dist[j1] + dist[j2] * dist[j2] + dist[j3] * dist[j3];
  const double d = std::sqrt(std::max(0.0, 6.0 * K2 - 2.0 * K1 * K1));
  if (K1 + d <= 3.0 * lambda1_cap) {
    const double peak = (K1 + d) / 3.0;
    const double pair = std::max(0.0, (2.0 * K1 - d) / 6.0);
    return detail::replace_triple(dist, j1, j2, j3, peak, pair, pair);
  }
  // uncapped image would exceed lambda1: pin it there, split the rest
  const double s = K1 - lambda1_cap;
  const double q = K2 - lambda1_cap * lambda1_cap;
  const double disc = std::sqrt(std::max(0.0, 2.0 * q - s * s));
  return detail::replace_triple(dist, j1, j2, j3, lambda1_cap, (s + disc) / 2.0,
                                std::max(0.0, (s - disc) / 2.0));
}

}  // namespace coboson
