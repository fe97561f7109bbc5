#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "coboson/schmidt.hpp"

using namespace coboson;

TEST_CASE("make_distribution sorts, validates, renormalizes") {
  const auto d = make_distribution({0.3, 0.2, 0.5});
  CHECK(d.coefficients() == std::vector<double>{0.5, 0.3, 0.2});

  const auto single = make_distribution({1.0});
  CHECK(single.size() == 1);
  CHECK(single.lambda1() == 1.0);

  const auto scaled = make_distribution({2.0, 1.0, 1.0}, /*renormalize=*/true);
  CHECK(scaled.coefficients() == std::vector<double>{0.5, 0.25, 0.25});

  CHECK_THROWS_AS(make_distribution({}), EmptyInput);
  CHECK_THROWS_AS(make_distribution({0.5, -0.1, 0.6}), NegativeCoefficient);
  CHECK_THROWS_AS(make_distribution({0.5, 0.4}), NotNormalized);
  // tiny negatives clamp to zero
  const auto clamped = make_distribution({1.0 + 1e-16, -1e-16});
  CHECK(clamped[1] == 0.0);
}

TEST_CASE("summarize power sums and derived quantifiers") {
  const auto d = make_distribution({0.5, 0.3, 0.2});
  const auto s = summarize(d, 3);
  CHECK(s.lambda1 == 0.5);
  CHECK(s.purity == Catch::Approx(0.38).epsilon(1e-14));
  CHECK(s.power_sums[0] == Catch::Approx(1.0).margin(1e-14));
  CHECK(s.power_sums[2] == Catch::Approx(0.16).epsilon(1e-14));
  CHECK(s.schmidt_number == Catch::Approx(1.0 / 0.38).epsilon(1e-14));
  CHECK(s.geometric_entanglement == Catch::Approx(0.5).epsilon(1e-14));

  const auto product = summarize(make_distribution({1.0}), 2);
  CHECK(product.purity == 1.0);
  CHECK(product.schmidt_number == 1.0);
  CHECK(product.geometric_entanglement == 0.0);

  const auto uniform = summarize(make_distribution({0.25, 0.25, 0.25, 0.25}), 2);
  CHECK(uniform.purity == Catch::Approx(0.25).epsilon(1e-14));
  CHECK(uniform.schmidt_number == Catch::Approx(4.0).epsilon(1e-14));

  CHECK_THROWS_AS(summarize(d, 1), OutOfRange);
}

TEST_CASE("lambda1_min formula and grid-search oracle") {
  CHECK(lambda1_min(0.2) == Catch::Approx(0.2).margin(1e-14));
  CHECK(lambda1_min(0.001) == Catch::Approx(0.001).margin(1e-14));
  CHECK(lambda1_min(1.0) == 1.0);
  CHECK(lambda1_min(0.3) == Catch::Approx(0.3145497224367903).epsilon(1e-12));
  CHECK_THROWS_AS(lambda1_min(0.0), OutOfRange);
  CHECK_THROWS_AS(lambda1_min(1.5), OutOfRange);

  // independent oracle: minimize the largest coefficient over the 4-point
  // simplex at purity 0.3 by refined grid search over (a, b), splitting the
  // remaining mass into two coefficients that absorb the purity residue
  const double P = 0.3;
  double best = 1.0;
  double a_lo = 0.25, a_hi = 0.5, b_lo = 0.0, b_hi = 0.5;
  for (int pass = 0; pass < 4; ++pass) {
    const int n = 120;
    double next_a = best;
    double na_lo = a_lo, na_hi = a_hi, nb_lo = b_lo, nb_hi = b_hi;
    for (int i = 0; i <= n; ++i) {
      const double a = a_lo + (a_hi - a_lo) * i / n;
      for (int j = 0; j <= n; ++j) {
        const double b = b_lo + (b_hi - b_lo) * j / n;
        if (b > a) continue;
        // remaining two coefficients: sum r = 1 - a - b, squares q = P - a^2 - b^2
        const double r = 1.0 - a - b, q = P - a * a - b * b;
        if (r < 0.0 || q < 0.0) continue;
        const double disc = 2.0 * q - r * r;
        if (disc < 0.0) continue;  // cannot split into two reals
        const double c = (r + std::sqrt(disc)) / 2.0;
        const double d = r - c;
        if (c > b + 1e-12 || d < -1e-12) continue;  // ordering a >= b >= c >= d >= 0
        if (a < next_a) {
          next_a = a;
          na_lo = std::max(a_lo, a - (a_hi - a_lo) / n * 2);
          na_hi = a + (a_hi - a_lo) / n * 2;
          nb_lo = std::max(0.0, b - (b_hi - b_lo) / n * 2);
          nb_hi = b + (b_hi - b_lo) / n * 2;
        }
      }
    }
    best = next_a;
    a_lo = na_lo;
    a_hi = na_hi;
    b_lo = nb_lo;
    b_hi = nb_hi;
  }
  CHECK(best == Catch::Approx(lambda1_min(P)).margin(1e-6));
}

TEST_CASE("lambda1_max, p_min, p_max") {
  CHECK(lambda1_max(0.25) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(lambda1_max(0.001) == Catch::Approx(0.03162277660168379).epsilon(1e-13));
  CHECK(lambda1_max(1.0) == 1.0);

  CHECK(p_min(0.3) == Catch::Approx(0.09).epsilon(1e-15));
  CHECK(p_max(0.3) == Catch::Approx(0.28).epsilon(1e-13));
  CHECK(p_max(0.5) == Catch::Approx(0.5).epsilon(1e-13));
  CHECK(p_min(1.0) == 1.0);
  CHECK(p_max(1.0) == Catch::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(p_max(0.0), OutOfRange);

  // oracle: maximize sum of squares with top coefficient c: k copies of c
  // plus a remainder that must itself stay <= c
  const double c = 0.3;
  double best = 0.0;
  for (int k = 1; k * c <= 1.0 + 1e-12; ++k) {
    const double rem = 1.0 - k * c;
    if (rem > c + 1e-12) continue;
    best = std::max(best, k * c * c + rem * rem);
  }
  CHECK(p_max(c) == Catch::Approx(best).epsilon(1e-13));
}

TEST_CASE("feasible region") {
  CHECK(feasible(0.2, 0.3));
  CHECK_FALSE(feasible(0.2, 0.5));   // above sqrt(P)
  CHECK_FALSE(feasible(0.2, 0.1));   // below lambda1_min
  CHECK(feasible(1.0, 1.0));
  CHECK_FALSE(feasible(0.0, 0.5));
  CHECK_FALSE(feasible(1.2, 0.5));
  // boundary values accepted within tolerance
  CHECK(feasible(0.2, std::sqrt(0.2)));
  CHECK(feasible(0.2, lambda1_min(0.2)));
}

TEST_CASE("lambda1_min is monotone non-decreasing across ceiling jumps") {
  for (int i = 1; i <= 2000; ++i) {
    const double P = i / 2000.0;
    CHECK(lambda1_min(P) <= lambda1_min(std::min(P + 1e-9, 1.0)) + 1e-9);
  }
}

TEST_CASE("random_distribution samples the simplex") {
  const auto forced = random_distribution(1, 7);
  CHECK(forced.coefficients() == std::vector<double>{1.0});

  const auto d = random_distribution(12, 42);
  CHECK(d.size() == 12);
  CHECK(std::is_sorted(d.coefficients().begin(), d.coefficients().end(), std::greater<>()));
  const auto s = summarize(d, 2);
  CHECK(s.power_sums[0] == Catch::Approx(1.0).margin(1e-12));
  // invariants of every generated distribution
  CHECK(s.lambda1 * s.lambda1 <= s.purity + 1e-12);
  CHECK(s.purity <= s.lambda1 + 1e-12);
  CHECK(lambda1_min(s.purity) <= s.lambda1 + 1e-12);
  CHECK(s.lambda1 <= std::sqrt(s.purity) + 1e-12);
  // reproducible
  const auto d2 = random_distribution(12, 42);
  CHECK(d.coefficients() == d2.coefficients());
}

TEST_CASE("constrained sampler hits (P, lambda1) or reports failure") {
  const auto d = random_distribution_constrained(0.2, 0.3, 6, 11);
  const auto s = summarize(d, 2);
  CHECK(std::abs(s.purity - 0.2) <= 1e-9);
  CHECK(std::abs(s.lambda1 - 0.3) <= 1e-9);

  CHECK_THROWS_AS(random_distribution_constrained(0.2, 0.5, 8, 1), InfeasiblePair);
  // S = 4 cannot host (0.2, 0.3): needs S >= 6
  CHECK_THROWS_AS(random_distribution_constrained(0.2, 0.3, 4, 1), InfeasiblePair);

  const auto one = random_distribution_constrained(1.0, 1.0, 1, 3);
  CHECK(one.coefficients() == std::vector<double>{1.0});

  // spread of samples across seeds, all pinned to the same summary
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = random_distribution_constrained(0.3, 0.4, 9, seed);
    const auto sx = summarize(x, 2);
    CHECK(std::abs(sx.purity - 0.3) <= 1e-9);
    CHECK(std::abs(sx.lambda1 - 0.4) <= 1e-9);
  }
}

TEST_CASE("sorting and renormalization are idempotent") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto d = random_distribution(1 + rng() % 20, rng());
    const auto again = make_distribution(d.coefficients());
    CHECK(again.coefficients() == d.coefficients());
    const auto renorm = make_distribution(d.coefficients(), /*renormalize=*/true);
    for (std::size_t j = 0; j < d.size(); ++j)
      CHECK(renorm[j] == Catch::Approx(d[j]).margin(1e-15));
  }
}
