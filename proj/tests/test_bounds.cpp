#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "slim/bounds.hpp"

using namespace slim;

namespace {

// Counts (v, q) with q in 1..lambda, v in [0, q)^p, gcd(v_1..v_p, q) = 1.
std::int64_t farey_brute(std::int64_t lambda, int p) {
  std::int64_t count = 0;
  for (std::int64_t q = 1; q <= lambda; ++q) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(p), 0);
    for (;;) {
      std::int64_t g = q;
      for (auto x : v) g = std::gcd(g, x);
      if (g == 1) ++count;
      std::size_t k = 0;
      for (; k < v.size(); ++k) {
        if (++v[k] < q) break;
        v[k] = 0;
      }
      if (k == v.size()) break;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("Farey counts agree with enumeration") {
  for (int p = 1; p <= 3; ++p)
    for (std::int64_t lambda = 1; lambda <= 8; ++lambda)
      CHECK(farey_count(lambda, p) == farey_brute(lambda, p));
  CHECK(farey_count(1, 1) == 1);
  CHECK(farey_count(5, 1) == 10);
  CHECK(farey_count(2, 2) == farey_brute(2, 2));
}

TEST_CASE("one-dimensional Farey counts are totient sums") {
  std::int64_t sum = 0;
  for (std::int64_t q = 1; q <= 40; ++q) {
    std::int64_t phi = 0;
    for (std::int64_t v = 0; v < q; ++v) phi += std::gcd(v, q) == 1;
    sum += phi;
    CHECK(farey_count(q, 1) == sum);
  }
}

TEST_CASE("Farey counts are monotone") {
  for (int p = 1; p <= 4; ++p)
    for (std::int64_t lambda = 1; lambda < 30; ++lambda) {
      CHECK(farey_count(lambda + 1, p) >= farey_count(lambda, p));
      CHECK(farey_count(lambda, p + 1) >= farey_count(lambda, p));
    }
}

TEST_CASE("Mobius table") {
  const auto mu = mobius_table(12);
  const std::vector<int> want{0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
  CHECK(mu == want);
}

TEST_CASE("theorem 1 gap") {
  const auto s = CoefficientSet::uniform(1, CoefficientDomain::bounded_integer(1));
  CHECK(lattice_size(s) == 3);
  const double g = theorem1_gap(s, 200, 0.05);
  CHECK(g == doctest::Approx(std::sqrt((std::log(4.0) - std::log(0.05)) / 400.0)).epsilon(1e-14));
  CHECK(std::abs(g - 0.10467) < 1e-5);
  CHECK(theorem1_gap(s, 800, 0.05) == doctest::Approx(g / 2).epsilon(1e-14));
  const auto zero = CoefficientSet::uniform(3, CoefficientDomain::explicit_set({Decimal{}}));
  CHECK(theorem1_gap(zero, 10, 0.5) == doctest::Approx(std::sqrt((std::log(2.0) - std::log(0.5)) / 20.0)));
  CHECK(theorem1_gap(1, 1, 200, 0.05) == g);
  CHECK_THROWS_AS(theorem1_gap(s, 200, 1.0), ArgumentError);
  CHECK_THROWS_AS(theorem1_gap(s, 200, 0.0), ArgumentError);
  CHECK_THROWS_AS(theorem1_gap(s, 0, 0.5), ArgumentError);
}

TEST_CASE("theorem 2 gap") {
  const double g = theorem2_gap(1, 1, 200, 0.05);
  CHECK(g == doctest::Approx(std::sqrt(-std::log(0.05) / 400.0)).epsilon(1e-14));
  CHECK(std::abs(g - 0.0866) < 1e-4);
  CHECK(theorem2_gap(5, 2, 200, 1.0) == doctest::Approx(std::sqrt(std::log(farey_count(5, 2).convert_to<double>()) / 400.0)));
  CHECK(theorem2_gap(5, 2, 4 * 123, 0.1) == doctest::Approx(theorem2_gap(5, 2, 123, 0.1) / 2).epsilon(1e-14));
  CHECK_THROWS_AS(theorem2_gap(5, 2, 10, 1.5), ArgumentError);
}

TEST_CASE("gaps shrink with n and grow as delta falls") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const std::int64_t lambda = std::uniform_int_distribution<std::int64_t>(1, 50)(rng);
    const int p = std::uniform_int_distribution<int>(1, 6)(rng);
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 5000)(rng);
    const double delta = std::uniform_real_distribution<double>(0.001, 0.9)(rng);
    CHECK(theorem1_gap(lambda, p, n + 1, delta) < theorem1_gap(lambda, p, n, delta));
    CHECK(theorem1_gap(lambda, p, n, delta / 2) > theorem1_gap(lambda, p, n, delta));
    CHECK(theorem2_gap(lambda, p, n + 1, delta) < theorem2_gap(lambda, p, n, delta));
    CHECK(theorem2_gap(lambda, p, n, delta / 2) > theorem2_gap(lambda, p, n, delta));
  }
}

TEST_CASE("log of huge counts") {
  const BigInt x = boost::multiprecision::pow(BigInt(201), 300);
  CHECK(log_big(x) == doctest::Approx(300 * std::log(201.0)).epsilon(1e-14));
  CHECK(log_big(BigInt(1)) == 0.0);
}
