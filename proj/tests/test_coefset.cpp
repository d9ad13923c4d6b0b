#include <random>

#include "doctest.h"
#include "slim/coefset.hpp"
#include "slim/decimal.hpp"
#include "slim/errors.hpp"
#include "slim/io.hpp"

using namespace slim;

namespace {

Decimal dec(const char* s) { return Decimal::parse(s); }

}  // namespace

TEST_CASE("decimal parsing and formatting") {
  CHECK(dec("12") == Decimal{12, 0});
  CHECK(dec("-0.25") == Decimal{-25, 2});
  CHECK(dec("1e-3") == Decimal{1, 3});
  CHECK(dec("+4.50") == Decimal{45, 1});
  CHECK(dec("9e2") == Decimal{900, 0});
  CHECK(dec("-0") == Decimal{});
  CHECK(dec("0.003").to_string() == "0.003");
  CHECK(Decimal{-25, 2}.to_string() == "-0.25");
  CHECK_THROWS_AS(dec("abc"), ParseError);
  CHECK_THROWS_AS(dec("1.2.3"), ParseError);
  CHECK_THROWS_AS(dec(""), ParseError);
  CHECK(dec("0.5") < dec("1"));
  CHECK(dec("-1") < dec("-0.5"));
  CHECK(Decimal::from_double(0.1) == Decimal{1, 1});
  CHECK(Decimal{10, 1}.normalized() == Decimal{1, 0});
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("decimal ordering agrees with doubles") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> m(-100000, 100000);
  std::uniform_int_distribution<int> sc(0, 5);
  for (int t = 0; t < 2000; ++t) {
    const Decimal a = Decimal{m(rng), sc(rng)}.normalized(), b = Decimal{m(rng), sc(rng)}.normalized();
    CHECK((a < b) == (a.to_double() < b.to_double()));
    CHECK(Decimal::parse(a.to_string()) == a);
  }
}

TEST_CASE("membership") {
  const auto b10 = CoefficientSet::uniform(3, CoefficientDomain::bounded_integer(10));
  CHECK(contains(b10, Eigen::Vector3d(3, -5, 0)));
  CHECK_FALSE(contains(b10, Eigen::Vector3d(3, -11, 0)));
  CHECK_FALSE(contains(b10, Eigen::Vector3d(0.5, 0, 0)));
  CHECK_THROWS_AS(contains(b10, Eigen::Vector2d(0, 0)), ArgumentError);

  const auto pos = CoefficientDomain::signed_integer(Sign::kPositive, 5);
  CHECK_FALSE(pos.contains(dec("-1")));
  CHECK(pos.contains(dec("5")));

  const auto sd2 = CoefficientDomain::significant_digits(2, 0, 3);
  CHECK(sd2.contains(dec("9900")));
  CHECK(sd2.contains(dec("-9900")));
  CHECK(sd2.contains(dec("99")));
  CHECK_FALSE(sd2.contains(dec("105")));
}

TEST_CASE("enumeration") {
  const auto b2 = enumerate(CoefficientDomain::bounded_integer(2));
  CHECK(b2 == std::vector<Decimal>{dec("-2"), dec("-1"), dec("0"), dec("1"), dec("2")});

  const auto sd1 = CoefficientDomain::significant_digits(1, -3, 2);
  CHECK(sd1.size() == 109);
  CHECK(sd1.contains(dec("0.003")));
  CHECK(sd1.contains(dec("900")));
  CHECK(sd1.scale() == 3);

  // independent enumeration of two significant digits over E in 0..3
  std::vector<Decimal> expect;
  for (int e = 0; e <= 3; ++e)
    for (int d1 = -9; d1 <= 9; ++d1)
      for (int d2 = -9; d2 <= 9; ++d2) {
        std::int64_t v = d1;
        for (int k = 0; k < e; ++k) v *= 10;
        std::int64_t w = d2;
        if (e == 0) {
          expect.push_back(Decimal{d1 * 10 + d2, 1}.normalized());
          continue;
        }
        for (int k = 0; k < e - 1; ++k) w *= 10;
        expect.push_back(Decimal::from_int(v + w));
      }
  expect.push_back(Decimal{});
  std::sort(expect.begin(), expect.end());
  expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
  CHECK(enumerate(CoefficientDomain::significant_digits(2, 0, 3)) == expect);

  CHECK_THROWS_AS(CoefficientDomain::explicit_set({dec("1")}), ArgumentError);
  const auto ex = CoefficientDomain::explicit_set({dec("0.50"), dec("0"), dec("0.5")});
  CHECK(ex.size() == 2);
}

TEST_CASE("coprime reduction") {
  CHECK(coprime_reduce(Eigen::Vector3d(2, 4, 6)) == Eigen::Vector3d(1, 2, 3));
  CHECK(coprime_reduce(Eigen::Vector3d(0, 0, 0)) == Eigen::Vector3d(0, 0, 0));
  CHECK(coprime_reduce(Eigen::Vector2d(3, 5)) == Eigen::Vector2d(3, 5));
  CHECK(coprime_reduce(Eigen::Vector2d(-4, 6)) == Eigen::Vector2d(-2, 3));
  CHECK_THROWS_AS(coprime_reduce(Eigen::Vector2d(0.5, 1)), ArgumentError);
}

TEST_CASE("max l1") {
  CHECK(max_l1(CoefficientSet::uniform(3, CoefficientDomain::bounded_integer(10))) == 30);
  const CoefficientSet mixed({CoefficientDomain::bounded_integer(5), CoefficientDomain::signed_integer(Sign::kPositive, 3),
                              CoefficientDomain::explicit_set({dec("0"), dec("0.5")})});
  CHECK(max_l1(mixed) == 8.5);
  CHECK(max_l1(CoefficientSet::uniform(2, CoefficientDomain::explicit_set({Decimal{}}))) == 0);
}

TEST_CASE("tiers") {
  CoefficientSet s = CoefficientSet::uniform(1, CoefficientDomain::bounded_integer(3));
  s.set_tiers(0, {{{dec("0"), dec("1"), dec("-1")}, 0.01}, {{dec("2"), dec("3"), dec("-2"), dec("-3")}, 0.02}});
  CHECK(s.has_tiers());
  CHECK(s.tier_of(0, dec("-3")) == 2);
  CHECK(s.tier_cost(0, dec("1")) == 0.01);
  CHECK_THROWS_AS(s.set_tiers(0, {{{dec("0"), dec("1")}, 0.01}}), ArgumentError);
  CHECK_THROWS_AS(s.set_tiers(0, {{{dec("0"), dec("1"), dec("-1")}, 0.02},
                                  {{dec("2"), dec("3"), dec("-2"), dec("-3")}, 0.01}}),
                  ArgumentError);
}

TEST_CASE("coefficient set documents") {
  const std::vector<std::string> names{"(Intercept)", "a", "b"};
  const auto doc = nlohmann::json::parse(R"js({
    "default": {"type": "integer", "max": 10},
    "features": {
      "a": {"type": "integer", "max": 5, "sign": "pos"},
      "b": {"type": "set", "values": [0, 0.5, -1]},
      "(Intercept)": {"type": "significant_digits", "digits": 1, "exponent_min": 0, "exponent_max": 1}
    }})js");
  const auto s = parse_coefset(doc, names);
  CHECK(s.domain(1).min() == Decimal{});
  CHECK(s.domain(1).max() == dec("5"));
  CHECK(s.domain(2).size() == 3);
  CHECK(s.domain(0).contains(dec("90")));
  const auto again = parse_coefset(coefset_to_json(s, names), names);
  for (Index j = 0; j < 3; ++j) CHECK(again.domain(j).values() == s.domain(j).values());

  CHECK(parse_coefset(nlohmann::json::object(), names).domain(2).max() == dec("100"));
  CHECK_THROWS_AS(parse_coefset(nlohmann::json::parse(R"({"features": {"zzz": {"type": "integer", "max": 1}}})"), names),
                  ArgumentError);
  CHECK_THROWS(parse_coefset(nlohmann::json::parse(R"({"default": {"type": "bogus"}})"), names));
  CHECK_THROWS(parse_coefset(nlohmann::json::parse(R"({"default": {"type": "set", "values": [1, 2]}})"), names));

  const auto tiered = parse_coefset(nlohmann::json::parse(R"({
    "default": {"type": "integer", "max": 2,
                "tiers": [{"cost": 0.01, "values": [0, 1, -1]}, {"cost": 0.05, "values": [2, -2]}]}})"),
                                    names);
  CHECK(tiered.has_tiers());
  CHECK(tiered.tier_cost(2, dec("-2")) == 0.05);
}
