// Normalization factor chi_N = N! e_N(lambda) and the ratio chi_{N+1}/chi_N,
// by four routes: the incremental elementary-symmetric-polynomial recurrence
// (all terms non-negative, log-domain), the Newton-Girard identities (linear
// domain, cancellation-monitored), the multiplicity-block convolution, and a
// subset-enumeration brute force used as the reference oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "coboson/errors.hpp"
#include "coboson/log_domain.hpp"
#include "coboson/schmidt.hpp"

namespace coboson {

enum class ChiSource { Esp, NewtonGirard, Multiplicity, BruteForce };

inline const char* to_string(ChiSource s) {
  switch (s) {
    case ChiSource::Esp: return "esp";
    case ChiSource::NewtonGirard: return "newton_girard";
    case ChiSource::Multiplicity: return "multiplicity";
    case ChiSource::BruteForce: return "brute_force";
  }
  return "?";
}

// chi_0 ... chi_Nmax in log-domain. chi_0 = chi_1 = 1 exactly; entries past
// the number of strictly positive coefficients are exact zeros.
class ChiSeries {
 public:
  ChiSeries(std::vector<LogReal> chi, ChiSource source, std::vector<bool> flagged = {})
      : chi_(std::move(chi)), source_(source), flagged_(std::move(flagged)) {
    if (chi_.empty()) throw OutOfRange("ChiSeries: needs at least chi_0");
    chi_[0] = LogReal::one();
    if (chi_.size() > 1 && !chi_[1].is_zero()) chi_[1] = LogReal::one();
  }

  std::int64_t n_max() const { return static_cast<std::int64_t>(chi_.size()) - 1; }
  ChiSource source() const { return source_; }

  LogReal chi_log(std::int64_t N) const {
    if (N < 0 || N > n_max()) throw OutOfRange("ChiSeries::chi_log: N = " + std::to_string(N));
    return chi_[static_cast<std::size_t>(N)];
  }
  double chi(std::int64_t N) const { return chi_log(N).linear(); }
  bool is_zero(std::int64_t N) const { return chi_log(N).is_zero(); }

  // chi_{N+1}/chi_N; 0 over positive is 0, 0 over 0 is NaN (undefined).
  double ratio(std::int64_t N) const {
    const LogReal num = chi_log(N + 1);
    const LogReal den = chi_log(N);
    if (den.is_zero())
      return num.is_zero() ? std::numeric_limits<double>::quiet_NaN()
                           : std::numeric_limits<double>::infinity();
    return (num / den).linear();
  }

  // Newton-Girard per-N cancellation flag (empty for other engines).
  bool cancellation_flagged(std::int64_t N) const {
    const auto i = static_cast<std::size_t>(N);
    return i < flagged_.size() && flagged_[i];
  }
  bool any_cancellation_flagged() const {
    return std::any_of(flagged_.begin(), flagged_.end(), [](bool b) { return b; });
  }

 private:
  std::vector<LogReal> chi_;
  ChiSource source_;
  std::vector<bool> flagged_;
};

inline std::vector<double> ratio_series(const ChiSeries& series) {
  std::vector<double> r(static_cast<std::size_t>(series.n_max()));
  for (std::int64_t n = 0; n < series.n_max(); ++n) r[static_cast<std::size_t>(n)] = series.ratio(n);
  return r;
}

// <N|[c, c^dag]|N> = 2 chi_{N+1}/chi_N - 1.
inline double commutator_expectation(double ratio) {
  if (std::isnan(ratio) || ratio < -1e-12 || ratio > 1.0 + 1e-12)
    throw OutOfRange("commutator_expectation: ratio outside [0, 1]");
  return 2.0 * std::clamp(ratio, 0.0, 1.0) - 1.0;
}

// <eps_N|eps_N> = 1 - N chi_N/chi_{N-1} + (N-1) chi_{N+1}/chi_N.
inline double epsilon_norm(const ChiSeries& series, std::int64_t N) {
  if (N < 1 || N > series.n_max() - 1) throw OutOfRange("epsilon_norm: need 1 <= N <= Nmax-1");
  const LogReal prev = series.chi_log(N - 1);
  const LogReal cur = series.chi_log(N);
  if (prev.is_zero()) throw Undefined("epsilon_norm: chi_{N-1} = 0");
  if (cur.is_zero()) throw Undefined("epsilon_norm: chi_N = 0, |N> does not exist");
  const double r1 = (cur / prev).linear();
  const double r2 = series.ratio(N);
  double v = 1.0 - static_cast<double>(N) * r1 + static_cast<double>(N - 1) * r2;
  if (v < 0.0 && v >= -1e-12) v = 0.0;
  return v;
}

namespace detail {

// In-place update of log e_k for one run of `mult` copies of `lam`:
// e'_n = sum_i C(mult, i) lam^i e_{n-i}. For mult = 1 this is the classic
// e_n <- e_n + lam e_{n-1} sweep; larger runs apply the exact composed form
// so uniform stretches cost O(n_eff * prior support) instead of O(mult * n).
inline void esp_apply_run(std::vector<double>& le, std::int64_t processed, double lam,
                          std::int64_t mult) {
  const auto n_cap = static_cast<std::int64_t>(le.size()) - 1;
  const double llam = std::log(lam);
  const std::int64_t hi = std::min(n_cap, processed + mult);
  if (mult == 1) {
    for (std::int64_t n = hi; n >= 1; --n) {
      const auto i = static_cast<std::size_t>(n);
      le[i] = log_add(le[i], llam + le[i - 1]);
    }
    return;
  }
  const double lm = static_cast<double>(mult);
  std::vector<double> lw(static_cast<std::size_t>(std::min(mult, hi)) + 1);
  for (std::size_t i = 0; i < lw.size(); ++i)
    lw[i] = log_binomial(lm, static_cast<std::int64_t>(i)) + static_cast<double>(i) * llam;
  for (std::int64_t n = hi; n >= 1; --n) {
    const std::int64_t i_lo = std::max<std::int64_t>(n - processed, 0);
    const std::int64_t i_hi = std::min<std::int64_t>({mult, n, static_cast<std::int64_t>(lw.size()) - 1});
    double acc = kNegInf;
    for (std::int64_t i = i_lo; i <= i_hi; ++i)
      acc = log_add(acc, lw[static_cast<std::size_t>(i)] + le[static_cast<std::size_t>(n - i)]);
    le[static_cast<std::size_t>(n)] = acc;
  }
}

inline std::vector<LogReal> chi_from_log_e(const std::vector<double>& le) {
  std::vector<LogReal> chi(le.size());
  for (std::size_t n = 0; n < le.size(); ++n)
    chi[n] = le[n] == kNegInf
                 ? LogReal::zero()
                 : LogReal::from_log(log_factorial(static_cast<std::int64_t>(n)) + le[n]);
  return chi;
}

}  // namespace detail

// chi_N = N! e_N by the incremental recurrence in log-domain. Runs of equal
// coefficients (the input is sorted) are folded into one exact block update.
inline ChiSeries chi_series_esp(const SchmidtDistribution& dist, std::int64_t n_max) {
  if (n_max < 0) throw OutOfRange("chi_series_esp: n_max must be >= 0");
  const auto support = static_cast<std::int64_t>(dist.positive_count());
  const std::int64_t n_eff = std::min(n_max, support);
  std::vector<double> le(static_cast<std::size_t>(n_eff) + 1, kNegInf);
  le[0] = 0.0;
  std::int64_t processed = 0;
  const auto& c = dist.coefficients();
  for (std::size_t j = 0; j < c.size();) {
    if (c[j] <= 0.0) break;  // sorted: only zeros remain
    std::size_t k = j + 1;
    while (k < c.size() && c[k] == c[j]) ++k;
    const auto mult = static_cast<std::int64_t>(k - j);
    detail::esp_apply_run(le, processed, c[j], mult);
    processed += mult;
    j = k;
  }
  auto chi = detail::chi_from_log_e(le);
  chi.resize(static_cast<std::size_t>(n_max) + 1, LogReal::zero());
  return ChiSeries(std::move(chi), ChiSource::Esp);
}

inline constexpr double kNgNegativeTol = 1e-9;  // |chi| below zero beyond this: hard failure
inline constexpr double kNgEps = 1.2e-16;       // rounding unit of the double inputs
// Thresholds act on the propagated bound, which majorizes the true error
// (observed by a factor of 1e2..1e4): below kNgFlagRel the 1e-9 agreement is
// rigorous; between the two the flag applies; above kNgHardRel the engine
// declines rather than return a value that may miss even the relaxed 1e-6.
inline constexpr double kNgFlagRel = 1e-9;
inline constexpr double kNgHardRel = 1e-5;

// chi_N = (N-1)! sum_m (-1)^{1+m} chi_{N-m} M(m) / (N-m)!, evaluated on the
// scaled quantities c_N = chi_N/N! (the e_N from power sums). The alternating
// signs amplify the rounding already present in the double power sums, so a
// first-order error bound is propagated alongside the recurrence: results
// whose estimated relative error passes kNgFlagRel carry a per-N flag, and
// past kNgHardRel the engine declines with CancellationFailure (the value
// would not honor even the relaxed agreement tolerance). Negative partials
// beyond -1e-9 in chi units also abort; smaller ones clamp to zero.
inline ChiSeries chi_series_newton_girard(std::span<const double> power_sums,
                                          std::int64_t n_max) {
  if (n_max < 0) throw OutOfRange("chi_series_newton_girard: n_max must be >= 0");
  if (static_cast<std::int64_t>(power_sums.size()) < n_max)
    throw OutOfRange("chi_series_newton_girard: need power sums M(1)..M(n_max)");
  if (n_max >= 1 && std::abs(power_sums[0] - 1.0) > kNormTol)
    throw NotNormalized("chi_series_newton_girard: M(1) != 1");

  std::vector<long double> c(static_cast<std::size_t>(n_max) + 1, 0.0L);
  std::vector<double> ebound(c.size(), 0.0);  // absolute error bound on c_N
  std::vector<bool> flagged(c.size(), false);
  c[0] = 1.0L;
  for (std::int64_t N = 1; N <= n_max; ++N) {
    long double pos = 0.0L, neg = 0.0L;
    double err = 0.0, gross = 0.0;
    for (std::int64_t m = 1; m <= N; ++m) {
      const auto i = static_cast<std::size_t>(N - m);
      const double Mm = power_sums[static_cast<std::size_t>(m - 1)];
      const long double term = c[i] * static_cast<long double>(Mm);
      if (m % 2 == 1)
        pos += term;
      else
        neg += term;
      const double cm = std::abs(static_cast<double>(c[i]));
      err += (ebound[i] + 2.0 * kNgEps * cm) * Mm;
      gross += cm * Mm;
    }
    long double cn = (pos - neg) / static_cast<long double>(N);
    const double bound = (err + kNgEps * gross) / static_cast<double>(N);
    if (cn < 0.0L) {
      const double log_chi_mag = log_factorial(N) + std::log(static_cast<double>(-cn));
      if (log_chi_mag > std::log(kNgNegativeTol))
        throw CancellationFailure("chi_series_newton_girard: chi_" + std::to_string(N) +
                                  " < -1e-9, precision collapsed; use the ESP engine");
      cn = 0.0L;
    } else if (cn > 0.0L && bound > kNgHardRel * static_cast<double>(cn)) {
      throw CancellationFailure("chi_series_newton_girard: chi_" + std::to_string(N) +
                                " lost more precision than the flag can cover; use the ESP engine");
    }
    flagged[static_cast<std::size_t>(N)] =
        cn <= 0.0L ? bound > 0.0 : bound > kNgFlagRel * static_cast<double>(cn);
    ebound[static_cast<std::size_t>(N)] = bound;
    c[static_cast<std::size_t>(N)] = cn;
  }

  std::vector<LogReal> chi(c.size());
  for (std::size_t n = 0; n < c.size(); ++n)
    chi[n] = c[n] <= 0.0L
                 ? LogReal::zero()
                 : LogReal::from_log(log_factorial(static_cast<std::int64_t>(n)) +
                                     static_cast<double>(std::log(c[n])));
  return ChiSeries(std::move(chi), ChiSource::NewtonGirard, std::move(flagged));
}

// Schmidt coefficients grouped by value: strictly decreasing values with
// multiplicities, total weight 1. The compact input for spectra with large
// coefficient multiplicities.
struct MultiplicityBlocks {
  struct Block {
    double value = 0.0;
    std::int64_t multiplicity = 0;
  };
  std::vector<Block> blocks;

  void validate() const {
    if (blocks.empty()) throw EmptyInput("MultiplicityBlocks: no blocks");
    double sum = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].value < 0.0) throw NegativeCoefficient("MultiplicityBlocks: negative value");
      if (blocks[i].multiplicity < 1) throw OutOfRange("MultiplicityBlocks: multiplicity < 1");
      if (i > 0 && !(blocks[i].value < blocks[i - 1].value))
        throw OutOfRange("MultiplicityBlocks: values must be strictly decreasing");
      sum += blocks[i].value * static_cast<double>(blocks[i].multiplicity);
    }
    if (std::abs(sum - 1.0) > kNormTol)
      throw NotNormalized("MultiplicityBlocks: sum = " + std::to_string(sum));
  }

  SchmidtDistribution expand() const {
    validate();
    std::vector<double> v;
    for (const auto& b : blocks)
      v.insert(v.end(), static_cast<std::size_t>(b.multiplicity), b.value);
    return SchmidtDistribution(std::move(v));
  }
};

namespace detail {

// e-series of chi over blocks, with an optional S -> infinity uniform tail of
// total mass tail_mass whose e-contribution is tail_mass^k / k!. Pairwise
// log-domain convolution, O(n_max^2) per block.
inline std::vector<double> log_e_blocks(const std::vector<MultiplicityBlocks::Block>& blocks,
                                        double tail_mass, std::int64_t n_max) {
  std::vector<double> le(static_cast<std::size_t>(n_max) + 1, kNegInf);
  le[0] = 0.0;
  std::int64_t processed = 0;
  for (const auto& b : blocks) {
    if (b.value <= 0.0) continue;
    esp_apply_run(le, processed, b.value, b.multiplicity);
    processed += b.multiplicity;
  }
  if (tail_mass > 0.0) {
    const double lt = std::log(tail_mass);
    for (std::int64_t n = n_max; n >= 1; --n) {
      double acc = kNegInf;
      const std::int64_t i_lo = std::max<std::int64_t>(n - processed, 0);
      for (std::int64_t i = i_lo; i <= n; ++i) {
        const double lw = static_cast<double>(i) * lt - log_factorial(i);
        acc = log_add(acc, lw + le[static_cast<std::size_t>(n - i)]);
      }
      le[static_cast<std::size_t>(n)] = acc;
    }
  }
  return le;
}

inline ChiSeries chi_blocks(const std::vector<MultiplicityBlocks::Block>& blocks,
                            double tail_mass, std::int64_t n_max, ChiSource source) {
  auto le = log_e_blocks(blocks, tail_mass, n_max);
  return ChiSeries(chi_from_log_e(le), source);
}

}  // namespace detail

// Per-block closed form chi_k = lam^k m!/(m-k)! combined by the binomial
// convolution; cost O(n_max^2 * #blocks), independent of the total S.
inline ChiSeries chi_multiplicity(const MultiplicityBlocks& blocks, std::int64_t n_max) {
  if (n_max < 0) throw OutOfRange("chi_multiplicity: n_max must be >= 0");
  blocks.validate();
  return detail::chi_blocks(blocks.blocks, 0.0, n_max, ChiSource::Multiplicity);
}

inline constexpr std::int64_t kBruteForceMaxS = 24;

// Exact N! sum over index subsets; the reference oracle for the engines.
inline double chi_bruteforce(const SchmidtDistribution& dist, std::int64_t N) {
  const auto S = static_cast<std::int64_t>(dist.size());
  if (S > kBruteForceMaxS) throw TooLarge("chi_bruteforce: S > 24");
  if (N < 0) throw OutOfRange("chi_bruteforce: N < 0");
  if (N == 0) return 1.0;
  if (N > S) return 0.0;

  // next-combination enumeration of N indices out of S
  std::vector<std::int64_t> idx(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) idx[static_cast<std::size_t>(i)] = i;
  long double total = 0.0L;
  while (true) {
    long double prod = 1.0L;
    for (std::int64_t i : idx) prod *= dist[static_cast<std::size_t>(i)];
    total += prod;
    std::int64_t k = N - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == S - N + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (std::int64_t i = k + 1; i < N; ++i)
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
  }
  long double fact;
  if (N <= 20) {
    fact = static_cast<long double>(exact_factorial_u64(static_cast<int>(N)));
  } else {
    fact = 1.0L;
    for (std::int64_t i = 2; i <= N; ++i) fact *= static_cast<long double>(i);
  }
  return static_cast<double>(fact * total);
}

}  // namespace coboson
