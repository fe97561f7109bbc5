// Closed-form bounds on chi_N and chi_{N+1}/chi_N at fixed purity and/or
// largest Schmidt coefficient, and the assembled six-entry hierarchy
//   uniform_L1 <= uniform_P <= min_PL1 <= chi_N <= max_PL1 <= peaked_P <= peaked_L1.
// Everything is evaluated in log-domain; N is capped at 1e6 and no input in
// range may produce a non-finite log magnitude.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "coboson/errors.hpp"
#include "coboson/log_domain.hpp"
#include "coboson/schmidt.hpp"

namespace coboson {

inline constexpr std::int64_t kMaxBoundN = 1000000;
inline constexpr double kHierarchyTol = 1e-10;  // relative chain ordering tolerance

namespace detail {

inline void check_N(std::int64_t N) {
  if (N < 0 || N > kMaxBoundN)
    throw OutOfRange("bounds: N outside [0, 1e6]: " + std::to_string(N));
}

// (1 - top)^{N-1} (1 + (N-1) top): chi of one coefficient `top` over an
// infinitesimal uniform tail.
inline LogReal log_peaked(double top, std::int64_t N) {
  if (N <= 1) return LogReal::one();
  const double n1 = static_cast<double>(N - 1);
  if (top >= 1.0) return LogReal::zero();
  return LogReal::from_log(n1 * std::log1p(-top) + std::log(1.0 + n1 * top));
}

// top^{N-1} (L-1)!/(L-N)! [N - L top (N-1)] with g = L top - 1 supplied by
// the caller in whichever form avoids cancellation.
inline LogReal log_uniform_family(double top, std::int64_t L, double g, std::int64_t N) {
  if (N <= 1) return LogReal::one();
  if (N > L) return LogReal::zero();
  const double bracket = 1.0 - g * static_cast<double>(N - 1);
  if (bracket <= 0.0) return LogReal::zero();
  const double Ld = static_cast<double>(L);
  return LogReal::from_log(static_cast<double>(N - 1) * std::log(top) + lgamma_pos(Ld) -
                           lgamma_pos(Ld - static_cast<double>(N) + 1.0) + std::log(bracket));
}

}  // namespace detail

// chi of the peaked distribution at fixed P (lambda1 = sqrt(P), S -> inf).
inline LogReal chi_upper_P(double P, std::int64_t N) {
  if (!(P > 0.0) || P > 1.0) throw OutOfRange("chi_upper_P: P outside (0, 1]");
  detail::check_N(N);
  return detail::log_peaked(std::sqrt(P), N);
}

// chi of the uniform distribution at fixed P (ceil(1/P) modes at lambda1_min).
inline LogReal chi_lower_P(double P, std::int64_t N) {
  if (!(P > 0.0) || P > 1.0) throw OutOfRange("chi_lower_P: P outside (0, 1]");
  detail::check_N(N);
  const auto L = static_cast<std::int64_t>(snapped_ceil(1.0 / P));
  if (L == 1) return N <= 1 ? LogReal::one() : LogReal::zero();
  const double g = std::sqrt(std::max(0.0, (P * static_cast<double>(L) - 1.0) /
                                               (static_cast<double>(L) - 1.0)));
  const double top = (1.0 + g) / static_cast<double>(L);
  return detail::log_uniform_family(top, L, g, N);
}

// chi of the peaked distribution once only lambda1 is known (P at lambda1^2).
inline LogReal chi_upper_lambda1(double lambda1, std::int64_t N) {
  if (!(lambda1 > 0.0) || lambda1 > 1.0) throw OutOfRange("chi_upper_lambda1");
  detail::check_N(N);
  return detail::log_peaked(lambda1, N);
}

// chi of the maximal-multiplicity distribution once only lambda1 is known
// (floor(1/lambda1) copies plus the remainder; P at its maximum).
inline LogReal chi_lower_lambda1(double lambda1, std::int64_t N) {
  if (!(lambda1 > 0.0) || lambda1 > 1.0) throw OutOfRange("chi_lower_lambda1");
  detail::check_N(N);
  const double f = snapped_floor(1.0 / lambda1);
  const auto L = static_cast<std::int64_t>(f) + 1;
  const double g = lambda1 * (f + 1.0) - 1.0;
  return detail::log_uniform_family(lambda1, L, g, N);
}

// chi of the minimizing distribution at fixed (P, lambda1), evaluated from
// its three-value closed form; exact zero once N exceeds its S.
inline LogReal chi_min_exact(double P, double lambda1, std::int64_t N) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("chi_min_exact");
  detail::check_N(N);
  if (N <= 1) return LogReal::one();
  const double q = P - lambda1 * lambda1;
  if (q <= 1e-12) return detail::log_peaked(lambda1, N);  // degenerate peaked limit
  const double ratio = (1.0 - lambda1) * (1.0 - lambda1) / q;
  const double Sd = 1.0 + snapped_ceil(ratio);
  if (static_cast<double>(N) > Sd) return LogReal::zero();
  double lam2, lamS;
  if (Sd == 2.0) {
    lam2 = lamS = 1.0 - lambda1;
  } else {
    // stable radical, see minimizing_distribution: R^2 = (S-2) q (S-1-ratio)
    const double frac = Sd - 1.0 - ratio;
    if (frac < -1e-6) throw InfeasiblePair("chi_min_exact: negative radical");
    const double R = std::sqrt((Sd - 2.0) * q * std::max(frac, 0.0));
    lam2 = (1.0 - lambda1) / (Sd - 1.0) + R / ((Sd - 2.0) * (Sd - 1.0));
    lamS = std::max(0.0, (1.0 - lambda1 - R) / (Sd - 1.0));
  }
  const double Nd = static_cast<double>(N);
  const double bracket = (Nd - Sd) * lam2 * ((Nd - Sd + 1.0) * lam2 - Nd * (lambda1 + lamS)) +
                         (Nd - 1.0) * Nd * lambda1 * lamS;
  if (bracket <= 0.0) return LogReal::zero();
  return LogReal::from_log((Nd - 2.0) * std::log(lam2) + std::log(bracket) + lgamma_pos(Sd - 1.0) -
                           lgamma_pos(Sd - Nd + 1.0));
}

// Smooth lower bound: the minimizing closed form with the ceiling omitted,
// continued through the Gamma function. Applicable for N <= S only; equals
// chi_min_exact when (1-lambda1)^2/(P-lambda1^2) is an integer.
inline LogReal chi_min_smooth(double P, double lambda1, std::int64_t N) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("chi_min_smooth");
  detail::check_N(N);
  if (N <= 1) return LogReal::one();
  const double q = P - lambda1 * lambda1;
  if (q <= 1e-12) return detail::log_peaked(lambda1, N);
  const double a = (1.0 - lambda1) * (1.0 - lambda1) / q;
  if (static_cast<double>(N) > 1.0 + snapped_ceil(a))
    throw NotApplicable("chi_min_smooth: N beyond the minimizing support");
  const double Nd = static_cast<double>(N);
  const double bracket = 1.0 + (Nd - 2.0) * lambda1 - P * (Nd - 1.0);
  if (bracket <= 0.0) return LogReal::zero();
  return LogReal::from_log(lgamma_pos(a) - lgamma_pos(2.0 - Nd + a) + std::log(bracket) +
                           (Nd - 2.0) * (std::log(q) - std::log1p(-lambda1)));
}

// chi of the maximizing distribution at fixed (P, lambda1) in the S -> inf
// limit: the finite double sum over the lambda1 plateau, the pivot lambda_L,
// and the infinitesimal tail of mass lambdaSigma.
inline LogReal chi_max_exact(double P, double lambda1, std::int64_t N) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("chi_max_exact");
  detail::check_N(N);
  if (N == 0) return LogReal::one();
  const auto L = static_cast<std::int64_t>(std::max(1.0, snapped_ceil(P / (lambda1 * lambda1))));
  const double Ld = static_cast<double>(L);
  const double lamL = std::min(std::sqrt(std::max(0.0, P - (Ld - 1.0) * lambda1 * lambda1)), lambda1);
  const double lamSig = std::max(0.0, 1.0 - (Ld - 1.0) * lambda1 - lamL);
  const double lfactN = log_factorial(N);
  double acc = kNegInf;
  for (int K = 0; K <= 1; ++K) {
    if (K == 1 && lamL <= 0.0) continue;
    const std::int64_t m_hi = std::min<std::int64_t>(N - K, L - 1);
    for (std::int64_t M = 0; M <= m_hi; ++M) {
      const std::int64_t tail_pow = N - M - K;
      if (tail_pow > 0 && lamSig <= 0.0) continue;
      double lt = log_falling(Ld - 1.0, M) + static_cast<double>(M) * std::log(lambda1) + lfactN -
                  log_factorial(M) - log_factorial(K) - log_factorial(tail_pow);
      if (K == 1) lt += std::log(lamL);
      if (tail_pow > 0) lt += static_cast<double>(tail_pow) * std::log(lamSig);
      acc = log_add(acc, lt);
    }
  }
  return acc == kNegInf ? LogReal::zero() : LogReal::from_log(acc);
}

// Finite-S variant of the maximizing value (the pre-limit double sum with the
// uniform lambda_S block); used to show the bound is attained at finite size.
// lamL, lamS, L come from the maximizing construction at this S.
inline LogReal chi_max_finite_S(double lambda1, std::int64_t N, std::int64_t S, double lamL,
                                double lamS, std::int64_t L) {
  detail::check_N(N);
  const double Ld = static_cast<double>(L);
  const double Sd = static_cast<double>(S);
  const double lfactN = log_factorial(N);
  double acc = kNegInf;
  for (int K = 0; K <= 1; ++K) {
    if (K == 1 && lamL <= 0.0) continue;
    const std::int64_t m_hi = std::min<std::int64_t>(N - K, L - 1);
    for (std::int64_t M = 0; M <= m_hi; ++M) {
      const std::int64_t tail_pow = N - M - K;
      if (tail_pow > S - L) continue;  // 1/negative! = 0
      if (tail_pow > 0 && lamS <= 0.0) continue;
      double lt = log_falling(Ld - 1.0, M) + log_falling(Sd - Ld, tail_pow) +
                  static_cast<double>(M) * std::log(lambda1) + lfactN - log_factorial(M) -
                  log_factorial(K) - log_factorial(tail_pow);
      if (K == 1) lt += std::log(lamL);
      if (tail_pow > 0) lt += static_cast<double>(tail_pow) * std::log(lamS);
      acc = log_add(acc, lt);
    }
  }
  return acc == kNegInf ? LogReal::zero() : LogReal::from_log(acc);
}

// Smooth upper bound: single sum with the ceiling omitted (L~ = P/lambda1^2)
// and Gamma-ratio weights; equals the exact maximum when L~ is an integer.
inline LogReal chi_max_smooth(double P, double lambda1, std::int64_t N) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("chi_max_smooth");
  detail::check_N(N);
  if (N == 0) return LogReal::one();
  const double Lt = P / (lambda1 * lambda1);
  const double lamSig = std::max(0.0, 1.0 - P / lambda1);
  const std::int64_t m_cap = std::min<std::int64_t>(N, static_cast<std::int64_t>(snapped_floor(Lt)) + 1);
  double acc = kNegInf;
  for (std::int64_t M = 0; M <= m_cap; ++M) {
    const double garg = Lt - static_cast<double>(M) + 1.0;
    if (garg <= 0.0) continue;  // 1/Gamma(<=0) = 0
    const std::int64_t tail_pow = N - M;
    if (tail_pow > 0 && lamSig <= 0.0) continue;
    double lt = lgamma_pos(Lt + 1.0) - lgamma_pos(garg) + static_cast<double>(M) * std::log(lambda1) +
                log_binomial(static_cast<double>(N), M);
    if (tail_pow > 0) lt += static_cast<double>(tail_pow) * std::log(lamSig);
    acc = log_add(acc, lt);
  }
  return acc == kNegInf ? LogReal::zero() : LogReal::from_log(acc);
}

// Optional cross-check of chi_max_exact through the Tricomi-U closed form.
// 1-L is a non-positive integer, so U terminates as a polynomial; the
// alternating series is evaluated in plain doubles, hence the L cap.
inline double chi_max_tricomi(double P, double lambda1, std::int64_t N) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("chi_max_tricomi");
  detail::check_N(N);
  const auto L = static_cast<std::int64_t>(std::max(1.0, snapped_ceil(P / (lambda1 * lambda1))));
  if (L > 30) throw TooLarge("chi_max_tricomi: L > 30");
  const double Ld = static_cast<double>(L);
  const double lamL = std::min(std::sqrt(std::max(0.0, P - (Ld - 1.0) * lambda1 * lambda1)), lambda1);
  const double lamSig = 1.0 - (Ld - 1.0) * lambda1 - lamL;
  if (lamSig <= 0.0) throw NotApplicable("chi_max_tricomi: lambdaSigma = 0");
  const double z = -lamSig / lambda1;
  const auto n = L - 1;
  // U(-n, b, z) = sum_k (-n)_k (1-n-b)_k (-1)^k z^{n-k} / k!
  const auto hyperU = [&](double b) {
    double sum = 0.0, poch1 = 1.0, poch2 = 1.0, factk = 1.0;
    for (std::int64_t k = 0; k <= n; ++k) {
      if (k > 0) {
        poch1 *= (-static_cast<double>(n) + static_cast<double>(k) - 1.0);
        poch2 *= (1.0 - static_cast<double>(n) - b + static_cast<double>(k) - 1.0);
        factk *= static_cast<double>(k);
      }
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      sum += poch1 * poch2 * sign * std::pow(z, static_cast<double>(n - k)) / factk;
    }
    return sum;
  };
  const double Nd = static_cast<double>(N);
  const double u1 = hyperU(1.0 - Ld + Nd);
  const double u2 = hyperU(2.0 - Ld + Nd);
  return std::pow(-lambda1, Ld - 1.0) * std::pow(lamSig, Nd - Ld) * (Nd * lamL * u1 + lamSig * u2);
}

// Chain order: uniform_L1, uniform_P, min_PL1, max_PL1, peaked_P, peaked_L1.
inline constexpr std::array<const char*, 6> kChainNames = {
    "uniform_L1", "uniform_P", "min_PL1", "max_PL1", "peaked_P", "peaked_L1"};

struct BoundsReport {
  double P = 0.0;
  double lambda1 = 0.0;
  std::int64_t N = 0;
  std::array<LogReal, 6> chain;        // chi bounds at N, non-decreasing
  std::array<LogReal, 6> chain_next;   // same families at N + 1
  std::array<double, 6> ratio_chain;   // chi_{N+1}/chi_N per family; NaN undefined
  LogReal smooth_lower;
  LogReal smooth_upper;
  bool smooth_lower_applicable = false;

  // bits 0..5: ratio_chain entry defined; bit 6: smooth_lower applicable
  std::uint32_t validity() const {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 6; ++i)
      if (!std::isnan(ratio_chain[i])) v |= 1u << i;
    if (smooth_lower_applicable) v |= 1u << 6;
    return v;
  }
};

namespace detail {

inline std::array<LogReal, 6> chain_at(double P, double lambda1, std::int64_t n) {
  return {chi_lower_lambda1(lambda1, n), chi_lower_P(P, n), chi_min_exact(P, lambda1, n),
          chi_max_exact(P, lambda1, n), chi_upper_P(P, n), chi_upper_lambda1(lambda1, n)};
}

inline void assert_chain_order(const std::array<LogReal, 6>& chain, const char* what) {
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i].is_zero()) continue;
    if (chain[i + 1].is_zero() || chain[i].log() > chain[i + 1].log() + kHierarchyTol)
      throw HierarchyViolation(std::string("bounds_report: ") + what + " entry " +
                               kChainNames[i] + " exceeds " + kChainNames[i + 1]);
  }
}

}  // namespace detail

// Assembles and self-checks the full hierarchy at (P, lambda1, N). A chain
// ordering failure is an internal error (the ordering is a theorem), thrown
// as HierarchyViolation.
inline BoundsReport bounds_report(double P, double lambda1, std::int64_t N) {
  if (!feasible(P, lambda1)) throw InfeasiblePair("bounds_report");
  detail::check_N(N);
  BoundsReport rep;
  rep.P = P;
  rep.lambda1 = lambda1;
  rep.N = N;
  rep.chain = detail::chain_at(P, lambda1, N);
  rep.chain_next = detail::chain_at(P, lambda1, N + 1);
  detail::assert_chain_order(rep.chain, "chain");
  detail::assert_chain_order(rep.chain_next, "chain at N+1");
  for (std::size_t i = 0; i < 6; ++i) {
    if (rep.chain[i].is_zero())
      rep.ratio_chain[i] = std::numeric_limits<double>::quiet_NaN();
    else
      rep.ratio_chain[i] = (rep.chain_next[i] / rep.chain[i]).linear();
  }
  for (std::size_t i = 0; i + 1 < 6; ++i) {
    if (std::isnan(rep.ratio_chain[i]) || std::isnan(rep.ratio_chain[i + 1])) continue;
    if (rep.ratio_chain[i] > rep.ratio_chain[i + 1] + kHierarchyTol)
      throw HierarchyViolation("bounds_report: ratio chain ordering failed at " +
                               std::string(kChainNames[i]));
  }
  try {
    rep.smooth_lower = chi_min_smooth(P, lambda1, N);
    rep.smooth_lower_applicable = true;
    if (!rep.smooth_lower.is_zero() && !rep.chain[2].is_zero() &&
        rep.smooth_lower.log() > rep.chain[2].log() + kHierarchyTol)
      throw HierarchyViolation("bounds_report: smooth lower exceeds exact lower");
  } catch (const NotApplicable&) {
    rep.smooth_lower = LogReal::zero();
    rep.smooth_lower_applicable = false;
  }
  rep.smooth_upper = chi_max_smooth(P, lambda1, N);
  if (!rep.chain[3].is_zero() &&
      (rep.smooth_upper.is_zero() ||
       rep.chain[3].log() > rep.smooth_upper.log() + kHierarchyTol))
    throw HierarchyViolation("bounds_report: exact upper exceeds smooth upper");
  return rep;
}

}  // namespace coboson
