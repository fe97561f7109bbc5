// Log-domain arithmetic for non-negative reals whose magnitudes exceed the
// double range. Exact zero is carried as log = -infinity, which keeps it
// distinct from underflowed-but-positive values.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "coboson/errors.hpp"

namespace coboson {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b); -inf operands are exact zeros.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// lgamma for strictly positive arguments without the signgam global.
inline double lgamma_pos(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

inline double log_factorial(std::int64_t n) { return lgamma_pos(static_cast<double>(n) + 1.0); }

// log C(n, k) for real n >= k >= 0 (integer k).
inline double log_binomial(double n, std::int64_t k) {
  if (k < 0) return kNegInf;
  return lgamma_pos(n + 1.0) - log_factorial(k) - lgamma_pos(n - static_cast<double>(k) + 1.0);
}

// log of the falling factorial n (n-1) ... (n-k+1); real n.
inline double log_falling(double n, std::int64_t k) {
  if (k == 0) return 0.0;
  return lgamma_pos(n + 1.0) - lgamma_pos(n - static_cast<double>(k) + 1.0);
}

// n! as an exact integer; valid through n = 20.
inline std::uint64_t exact_factorial_u64(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// Ceil/floor with the argument snapped to the nearest integer when within
// 1e-9, so expressions like ceil(1/P) do not jump at representable inputs.
inline constexpr double kIntegerSnapTol = 1e-9;

inline double snapped_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kIntegerSnapTol) return r;
  return std::ceil(x);
}

inline double snapped_floor(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kIntegerSnapTol) return r;
  return std::floor(x);
}

// A non-negative real stored as its natural log. Supports the handful of
// operations the chi machinery needs; no subtraction by design (results
// stay non-negative, sign tracking is never required).
class LogReal {
 public:
  LogReal() : lg_(kNegInf) {}

  static LogReal zero() { return LogReal(); }
  static LogReal one() { return from_log(0.0); }
  static LogReal from_log(double lg) {
    LogReal v;
    v.lg_ = lg;
    return v;
  }
  static LogReal from_linear(double x) {
    if (std::isnan(x) || x < 0.0) throw OutOfRange("LogReal::from_linear: negative or NaN");
    LogReal v;
    v.lg_ = x == 0.0 ? kNegInf : std::log(x);
    return v;
  }

  bool is_zero() const { return lg_ == kNegInf; }
  double log() const { return lg_; }
  // exp(log); underflows to 0 / overflows to inf outside the double range.
  double linear() const { return is_zero() ? 0.0 : std::exp(lg_); }

  LogReal operator*(LogReal o) const {
    if (is_zero() || o.is_zero()) return zero();
    return from_log(lg_ + o.lg_);
  }
  LogReal operator/(LogReal o) const {
    if (o.is_zero()) throw Undefined("LogReal: division by exact zero");
    if (is_zero()) return zero();
    return from_log(lg_ - o.lg_);
  }
  LogReal operator+(LogReal o) const { return from_log(log_add(lg_, o.lg_)); }
  LogReal pow(double p) const {
    if (is_zero()) return p == 0.0 ? one() : zero();
    return from_log(lg_ * p);
  }

  bool operator<(LogReal o) const { return lg_ < o.lg_; }
  bool operator<=(LogReal o) const { return lg_ <= o.lg_; }
  bool operator==(LogReal o) const { return lg_ == o.lg_; }

 private:
  double lg_;
};

}  // namespace coboson
