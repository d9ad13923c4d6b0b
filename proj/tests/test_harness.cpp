#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "slim/errors.hpp"
#include "slim/harness.hpp"
#include "slim/io.hpp"

using namespace slim;

namespace {

Dataset separable_ish(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> feat(0, 3), bit(0, 1);
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXi y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1;
    x(i, 1) = feat(rng);
    x(i, 2) = feat(rng);
    y(i) = (x(i, 1) - x(i, 2) > 0) != (bit(rng) && bit(rng) && bit(rng)) ? 1 : -1;
  }
  return Dataset(x, y, {kInterceptName, "a", "b"}, Index{0});
}

}  // namespace

TEST_CASE("default grid is geometric between 1/N and 1") {
  const auto g = default_c0_grid(683);
  REQUIRE(g.size() == 6);
  CHECK(g.front() == doctest::Approx(1.0 / 683).epsilon(1e-12));
  CHECK(g.back() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 2; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-9));
}

TEST_CASE("mean, sample sd and median") {
  const auto [m, sd] = mean_sd({0.02, 0.04, 0.06});
  CHECK(m == doctest::Approx(0.04));
  CHECK(sd == doctest::Approx(0.02));
  CHECK(mean_sd({5.0}).second == 0.0);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("cv makes k runs per C0 and is reproducible") {
  const auto d = separable_ish(40, 3);
  const auto s = CoefficientSet::uniform(d.p(), CoefficientDomain::bounded_integer(3));
  SlimConfig cfg;
  cfg.time_budget_s = 30;
  const std::vector<double> grid{0.01, 0.1};
  CvOptions o;
  o.k = 5;
  o.seed = 42;
  int calls = 0;
  o.on_record = [&](const CvRecord&) { ++calls; };
  const auto a = run_cv(d, s, cfg, grid, o);
  CHECK(calls == 10);
  REQUIRE(a.records.size() == 10);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].c0 == grid[i / 5]);
    CHECK(a.records[i].fold == static_cast<int>(i % 5));
    CHECK(a.records[i].status == "optimal");
  }

  o.on_record = nullptr;
  o.jobs = 4;
  const auto b = run_cv(d, s, cfg, grid, o);
  std::ostringstream ca, cb;
  write_records_csv(a, ca);
  write_records_csv(b, cb);
  CHECK(ca.str() == cb.str());
  CHECK(canonical_dump(aggregates_json(a)) == canonical_dump(aggregates_json(b)));
  CHECK(ca.str().rfind("c0,fold,train_error,test_error,model_size,status,gap\n", 0) == 0);

  std::ostringstream with_rt;
  write_records_csv(a, with_rt, true);
  CHECK(with_rt.str().find("runtime_s") != std::string::npos);
}

TEST_CASE("aggregates follow the records") {
  CvReport r;
  r.c0_grid = {0.1, 0.2};
  r.k = 3;
  const double errs[] = {0.02, 0.04, 0.06};
  for (double c0 : r.c0_grid)
    for (int f = 0; f < 3; ++f) {
      CvRecord rec;
      rec.c0 = c0;
      rec.fold = f;
      rec.test_error = c0 == 0.1 ? errs[f] : 0.05;
      rec.train_error = 0.01;
      rec.model_size = f + 1;
      r.records.push_back(rec);
    }
  const auto ag = aggregate(r);
  REQUIRE(ag.size() == 2);
  CHECK(ag[0].test_error_mean == doctest::Approx(0.04));
  CHECK(ag[0].test_error_sd == doctest::Approx(0.02));
  CHECK(ag[0].model_size_median == 2);
  CHECK(ag[0].model_size_min == 1);
  CHECK(ag[0].model_size_max == 3);
  CHECK(select_c0(r, SelectionRule::kMinError) == 0.1);
  // 0.05 is within one standard error (0.02 / sqrt 3) of 0.04
  CHECK(select_c0(r, SelectionRule::kOneStandardError) == 0.2);
  const auto j = aggregates_json(r);
  CHECK(j.dump().find("selected_c0") != std::string::npos);
}

TEST_CASE("frontier dominance") {
  SUBCASE("three points") {
    const auto f = frontier({{"A", 0.05, 3}, {"B", 0.04, 5}, {"C", 0.06, 4}});
    CHECK_FALSE(f[0].dominated);
    CHECK_FALSE(f[1].dominated);
    CHECK(f[2].dominated);
  }
  SUBCASE("single point") { CHECK_FALSE(frontier({{"A", 0.1, 2}})[0].dominated); }
  SUBCASE("identical points") {
    const auto f = frontier({{"A", 0.1, 2}, {"B", 0.1, 2}});
    CHECK_FALSE(f[0].dominated);
    CHECK_FALSE(f[1].dominated);
  }
  SUBCASE("random sets against pairwise check") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> e(0, 5), sz(0, 5), cnt(1, 8);
    for (int t = 0; t < 200; ++t) {
      std::vector<FrontierPoint> pts;
      const int n = cnt(rng);
      for (int i = 0; i < n; ++i) pts.push_back({"p" + std::to_string(i), e(rng) / 100.0, double(sz(rng)), false});
      const auto f = frontier(pts);
      for (int i = 0; i < n; ++i) {
        bool dom = false;
        for (int k = 0; k < n; ++k) {
          const auto& a = pts[k];
          const auto& b = pts[i];
          dom |= a.test_error_mean <= b.test_error_mean && a.model_size_median <= b.model_size_median &&
                 (a.test_error_mean < b.test_error_mean || a.model_size_median < b.model_size_median);
        }
        CHECK(f[i].dominated == dom);
      }
    }
  }
}

TEST_CASE("frontier csv round trip") {
  const std::vector<FrontierPoint> pts{{"SLIM", 0.035, 3, false}, {"CART", 0.05, 7, true}};
  std::ostringstream os;
  write_frontier_csv(pts, os);
  std::istringstream in(os.str());
  const auto back = read_frontier_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == "SLIM");
  CHECK(back[1].test_error_mean == 0.05);
  CHECK(back[1].model_size_median == 7);
  std::istringstream bad("label,test_error,model_size\nX,abc,3\n");
  CHECK_THROWS_AS(read_frontier_csv(bad), ParseError);
}
