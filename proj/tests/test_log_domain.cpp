#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "coboson/log_domain.hpp"

using namespace coboson;

TEST_CASE("log_add handles exact zeros and ordinary values") {
  CHECK(log_add(kNegInf, kNegInf) == kNegInf);
  CHECK(log_add(kNegInf, 0.0) == 0.0);
  CHECK(log_add(0.0, kNegInf) == 0.0);
  CHECK(log_add(std::log(2.0), std::log(3.0)) == Catch::Approx(std::log(5.0)).epsilon(1e-15));
  // widely separated magnitudes: the small side vanishes without damage
  CHECK(log_add(0.0, -800.0) == Catch::Approx(0.0).margin(1e-300));
}

TEST_CASE("LogReal semantics") {
  const LogReal z = LogReal::zero();
  CHECK(z.is_zero());
  CHECK(z.linear() == 0.0);
  CHECK((z * LogReal::one()).is_zero());
  CHECK((z + LogReal::one()).linear() == Catch::Approx(1.0));
  CHECK_THROWS_AS(LogReal::one() / z, Undefined);
  CHECK_THROWS_AS(LogReal::from_linear(-1.0), OutOfRange);
  CHECK(LogReal::from_linear(0.0).is_zero());
  CHECK(LogReal::from_linear(0.5).linear() == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(z.pow(0.0).linear() == 1.0);
  CHECK(z.pow(3.0).is_zero());
  // values far outside the double range stay finite in log form
  const LogReal tiny = LogReal::from_log(-5.0e5);
  CHECK_FALSE(tiny.is_zero());
  CHECK(std::isfinite(tiny.log()));
  CHECK(tiny.linear() == 0.0);  // underflow on request, not in storage
}

TEST_CASE("factorials and binomials") {
  CHECK(exact_factorial_u64(0) == 1);
  CHECK(exact_factorial_u64(5) == 120);
  CHECK(exact_factorial_u64(20) == 2432902008176640000ull);
  for (int n = 0; n <= 20; ++n)
    CHECK(log_factorial(n) ==
          Catch::Approx(std::log(static_cast<double>(exact_factorial_u64(n)))).margin(1e-12));
  CHECK(std::exp(log_binomial(10.0, 3)) == Catch::Approx(120.0).epsilon(1e-13));
  CHECK(std::exp(log_falling(6.0, 2)) == Catch::Approx(30.0).epsilon(1e-13));
  CHECK(log_falling(6.0, 0) == 0.0);
}

TEST_CASE("snapped ceil/floor") {
  CHECK(snapped_ceil(4.0000000001) == 4.0);
  CHECK(snapped_ceil(4.0 - 1e-12) == 4.0);
  CHECK(snapped_ceil(4.1) == 5.0);
  CHECK(snapped_floor(4.9999999999) == 5.0);
  CHECK(snapped_floor(4.9) == 4.0);
  // 1/P at a representable reciprocal must not jump
  CHECK(snapped_ceil(1.0 / 0.2) == 5.0);
  CHECK(snapped_floor(1.0 / 0.25) == 4.0);
}
