#include <random>
#include <sstream>

#include "doctest.h"
#include "mip_oracle.hpp"
#include "oracles.hpp"
#include "slim/mip.hpp"
#include "slim/solver.hpp"

using namespace slim;

namespace {

Dataset two_by_two() {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, 1, -1;
  Eigen::VectorXi y(2);
  y << 1, -1;
  return Dataset(x, y, {"a", "b"});
}

SlimConfig cfg_with(double c0, double c1) {
  SlimConfig cfg;
  cfg.c0 = c0;
  cfg.c1 = c1;
  return cfg;
}

}  // namespace

TEST_CASE("standard model has N + 5P rows and N + 4P variables") {
  const auto d = two_by_two();
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(10));
  const auto m = build_model(d, s, cfg_with(0.1, 0.001), MipVariant::kStandard);
  CHECK(m.constraints.size() == 12);
  CHECK(m.variables.size() == 10);
  CHECK(m.count(VarKind::kBinary) == 4);
  CHECK(m.count(VarKind::kInteger) == 2);
  CHECK(m.count(VarKind::kContinuous) == 4);
  for (const char* name : {"z_0", "z_1", "alpha_0", "alpha_1"}) CHECK(m.find_variable(name)->kind == VarKind::kBinary);
  for (const char* name : {"beta_0", "I_1"}) CHECK(m.find_variable(name)->kind == VarKind::kContinuous);
}

TEST_CASE("big-M covers the worst margin") {
  Eigen::MatrixXd x(1, 2);
  x << 1, 2;
  Eigen::VectorXi y(1);
  y << 1;
  const Dataset d(x, y, {"a", "b"});
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(10));
  CHECK(big_m(d, s, 0.1)[0] == doctest::Approx(30.1));
  const auto m = build_model(d, s, cfg_with(0.1, 0.001), MipVariant::kStandard);
  CHECK(m.find_constraint("loss_0")->terms[0].coef == doctest::Approx(30.1));
}

TEST_CASE("pilm encodes tier and value indicators") {
  Eigen::MatrixXd x(2, 1);
  x << 1, -1;
  Eigen::VectorXi y(2);
  y << 1, -1;
  const Dataset d(x, y, {"a"});
  CoefficientSet s({CoefficientDomain::explicit_set({Decimal{-2, 0}, Decimal{-1, 0}, Decimal{0, 0}, Decimal{1, 0},
                                                      Decimal{2, 0}, Decimal{3, 0}, Decimal{4, 0}})});
  s.set_tiers(0, {{{Decimal{-1, 0}, Decimal{0, 0}, Decimal{1, 0}}, 0.01},
                  {{Decimal{-2, 0}, Decimal{2, 0}, Decimal{3, 0}, Decimal{4, 0}}, 0.05}});
  const auto m = build_model(d, s, cfg_with(0.1, 0.001), MipVariant::kPilm);
  int u = 0, sv = 0;
  for (const auto& v : m.variables) {
    if (v.name.rfind("u_", 0) == 0) ++u;
    if (v.name.rfind("s_", 0) == 0) ++sv;
  }
  CHECK(u == 7);
  CHECK(sv == 2);
  const auto* one = m.find_constraint("one_tier_0");
  REQUIRE(one);
  CHECK(one->sense == Sense::kEq);
  CHECK(one->rhs == 1.0);
  CHECK(one->terms.size() == 2);
}

TEST_CASE("pilm needs tiers and gapped domains use one-of-K") {
  const auto d = two_by_two();
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::explicit_set({Decimal{0, 0}, Decimal{5, 0}, Decimal{-5, 1}}));
  CHECK_THROWS_AS(build_model(d, s, cfg_with(0.1, 0.001), MipVariant::kPilm), ArgumentError);
  const auto m = build_model(d, s, cfg_with(0.1, 0.001), MipVariant::kStandard);
  CHECK(m.find_variable("lam_0")->kind == VarKind::kContinuous);
  CHECK(m.find_constraint("one_value_0")->sense == Sense::kLe);
  CHECK(m.find_constraint("value_1") != nullptr);
}

TEST_CASE("weighted model splits loss rows by label") {
  const auto d = two_by_two();
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(3));
  auto cfg = cfg_with(0.1, 0.001);
  cfg.w_plus = 3;
  cfg.w_minus = 0.5;
  const auto m = build_model(d, s, cfg, MipVariant::kWeighted);
  CHECK(m.find_constraint("loss_pos_0"));
  CHECK(m.find_constraint("loss_neg_1"));
  CHECK(m.objective[0].coef == doctest::Approx(1.5));
  CHECK(m.objective[1].coef == doctest::Approx(0.25));
}

TEST_CASE("LP text is stable and matches the golden file") {
  Eigen::MatrixXd x(1, 1);
  x << 2;
  Eigen::VectorXi y(1);
  y << -1;
  const Dataset d(x, y, {"f"});
  const auto s = CoefficientSet::uniform(1, CoefficientDomain::bounded_integer(1));
  const auto m = build_model(d, s, cfg_with(0.5, 0.25), MipVariant::kStandard);
  const std::string golden =
      "\\ sparse linear integer scoring system\n"
      "\\ variant: standard\n"
      "\\ n: 1\n"
      "\\ p: 1\n"
      "\\ c0: 0.5\n"
      "\\ c1: 0.25\n"
      "\\ w_plus: 1\n"
      "\\ w_minus: 1\n"
      "\\ gamma: 0.1\n"
      "\\ feature: lam_0 f\n"
      "Minimize\n"
      " obj: 1 z_0 + 1 I_0\n"
      "Subject To\n"
      " loss_0: 2.1 z_0 - 2 lam_0 >= 0.1\n"
      " cost_0: 1 I_0 - 0.5 alpha_0 - 0.25 beta_0 = 0\n"
      " nonzero_lo_0: 1 alpha_0 - 1 lam_0 >= 0\n"
      " nonzero_hi_0: 1 alpha_0 + 1 lam_0 >= 0\n"
      " abs_lo_0: 1 beta_0 - 1 lam_0 >= 0\n"
      " abs_hi_0: 1 beta_0 + 1 lam_0 >= 0\n"
      "Bounds\n"
      " 0 <= z_0 <= 1\n"
      " -1 <= lam_0 <= 1\n"
      " 0 <= alpha_0 <= 1\n"
      " 0 <= beta_0 <= 1\n"
      " I_0 >= 0\n"
      "Generals\n"
      " lam_0\n"
      "Binaries\n"
      " z_0 alpha_0\n"
      "End\n";
  CHECK(to_lp(m) == golden);
  CHECK(to_lp(m) == to_lp(build_model(d, s, cfg_with(0.5, 0.25), MipVariant::kStandard)));
}

TEST_CASE("LP round trip reproduces the model") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto inst = slim::testing::random_instance(rng, 25, 4, 7);
    for (const auto variant : {MipVariant::kStandard, MipVariant::kWeighted}) {
      auto cfg = cfg_with(0.013, 1.0 / 3.0);
      cfg.w_plus = 1.25;
      const auto m = build_model(inst.data, inst.set, cfg, variant);
      std::istringstream in(to_lp(m));
      CHECK(parse_lp(in) == m);
    }
  }
}

TEST_CASE("LP parser errors") {
  std::istringstream missing_end("Minimize\n obj: 1 x\nSubject To\n c: 1 x >= 1\n");
  CHECK_THROWS_AS(parse_lp(missing_end), ParseError);
  std::istringstream bad_number("Minimize\n obj: 1 x\nSubject To\n c: abc x >= 1\nEnd\n");
  CHECK_THROWS_AS(parse_lp(bad_number), ParseError);
}

TEST_CASE("solution files") {
  std::istringstream in("# comment\nz_0 1 lam_0 -2\nalpha_0 1e0\n");
  const auto a = read_solution(in);
  CHECK(a.at("z_0") == 1.0);
  CHECK(a.at("lam_0") == -2.0);
  CHECK(a.at("alpha_0") == 1.0);
  std::istringstream odd("z_0 1 lam_0\n");
  CHECK_THROWS_AS(read_solution(odd), ParseError);
}

TEST_CASE("exported model minimum equals the exhaustive optimum") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 40; ++t) {
    const auto inst = slim::testing::random_instance(rng, 12, 3, 5);
    auto cfg = cfg_with(0.04, 0.002);
    cfg.gamma = score_resolution(inst.data, inst.set);
    const bool weighted = t % 2 == 1;
    if (weighted) {
      cfg.w_plus = 1.5;
      cfg.w_minus = 0.75;
    }
    const auto m = build_model(inst.data, inst.set, cfg, weighted ? MipVariant::kWeighted : MipVariant::kStandard);
    double best = 1e300;
    slim::testing::for_each_lattice_point(inst.set, [&](const Eigen::VectorXd& lambda) {
      const auto a = slim::testing::complete_model(m, lambda);
      REQUIRE(a);
      best = std::min(best, model_objective(m, *a));
    });
    const auto bf = slim::testing::brute_force(inst.data, inst.set, cfg.c0, *cfg.c1, cfg.w_plus, cfg.w_minus);
    CHECK(best == doctest::Approx(bf.objective).epsilon(1e-9));
  }
}

TEST_CASE("verify_solution accepts solver optima") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto inst = slim::testing::random_instance(rng, 20, 4, 7);
    auto cfg = cfg_with(0.02, 0.001);
    cfg.gamma = score_resolution(inst.data, inst.set);
    const auto r = solve(inst.data, inst.set, cfg);
    const auto m = build_model(inst.data, inst.set, cfg, MipVariant::kStandard);
    const auto a = assignment_for(m, inst.data, inst.set, r.best.coefficients);
    const auto v = verify_solution(m, a, inst.data, &inst.set);
    CHECK(v.model_objective == doctest::Approx(r.objective.total()).epsilon(1e-9));
    CHECK(v.lambda == r.best.coefficients);
  }
}

TEST_CASE("zero vector with every z set is feasible") {
  const auto d = two_by_two();
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(10));
  const auto cfg = cfg_with(0.1, 0.001);
  const auto m = build_model(d, s, cfg, MipVariant::kStandard);
  Assignment a;
  for (const auto& v : m.variables) a[v.name] = 0.0;
  a["z_0"] = a["z_1"] = 1.0;
  const auto v = verify_solution(m, a, d, &s);
  CHECK(v.objective.total() == doctest::Approx(evaluate(d, Eigen::Vector2d::Zero(), cfg, &s).total()));
}

TEST_CASE("verify_solution names the violated row") {
  const auto d = two_by_two();
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(10));
  const auto m = build_model(d, s, cfg_with(0.1, 0.001), MipVariant::kStandard);
  // lambda = (0, 1): example 0 margin 2, example 1 margin 1.
  const auto good = assignment_for(m, d, s, Eigen::Vector2d(0, 1));
  CHECK_NOTHROW(verify_solution(m, good, d, &s));

  auto expect = [&](Assignment a, const std::string& row) {
    try {
      verify_solution(m, a, d, &s);
      FAIL("accepted a bad assignment for " << row);
    } catch (const InfeasibleSolutionError& e) {
      CHECK(std::string(e.what()).find(row) != std::string::npos);
    }
  };
  // lambda = (-1, 0) misclassifies example 0; leaving z_0 at 0 breaks its row.
  auto bad = assignment_for(m, d, s, Eigen::Vector2d(-1, 0));
  bad["z_0"] = 0.0;
  expect(bad, "loss_0");
  auto a1 = good;
  a1["alpha_1"] = 0.0;
  a1["I_1"] = 0.001;  // keep the cost row consistent
  expect(a1, "nonzero_lo_1");
  auto a2 = good;
  a2["beta_1"] = 0.5;
  a2["I_1"] = 0.1 + 0.0005;
  expect(a2, "abs_lo_1");
  auto a3 = good;
  a3["I_1"] = 0.0;
  expect(a3, "cost_1");
  auto a4 = good;
  a4["lam_0"] = 11.0;
  expect(a4, "bound on lam_0");
  auto a5 = good;
  a5["lam_0"] = 0.5;
  expect(a5, "integrality of lam_0");

  // Feasible but paying for a correctly classified example.
  auto a6 = good;
  a6["z_1"] = 1.0;
  CHECK_THROWS_AS(verify_solution(m, a6, d, &s), VerificationError);
  Assignment missing = good;
  missing.erase("z_0");
  CHECK_THROWS_AS(verify_solution(m, missing, d, &s), ArgumentError);
}

TEST_CASE("pilm model minimum equals the exhaustive tiered optimum") {
  std::mt19937_64 rng(606);
  for (int t = 0; t < 25; ++t) {
    auto inst = slim::testing::random_instance(rng, 10, 3, 5);
    for (Index j = 0; j < inst.set.p(); ++j) {
      Tier small{{}, 0.01}, large{{}, 0.03};
      for (const auto& v : inst.set.domain(j).values()) (v.abs() <= Decimal{1, 0} ? small : large).values.push_back(v);
      std::vector<Tier> tiers{small};
      if (!large.values.empty()) tiers.push_back(large);
      inst.set.set_tiers(j, tiers);
    }
    auto cfg = cfg_with(0.04, 0.002);
    cfg.gamma = score_resolution(inst.data, inst.set);
    const auto m = build_model(inst.data, inst.set, cfg, MipVariant::kPilm);
    double model_best = 1e300, direct_best = 1e300;
    slim::testing::for_each_lattice_point(inst.set, [&](const Eigen::VectorXd& lambda) {
      const auto a = slim::testing::complete_model(m, lambda);
      REQUIRE(a);
      model_best = std::min(model_best, model_objective(m, *a));
      double tier_cost = 0;
      for (Index j = 0; j < lambda.size(); ++j) tier_cost += inst.set.tier_cost(j, Decimal::from_double(lambda(j)));
      direct_best =
          std::min(direct_best, slim::testing::reference_objective(inst.data, lambda, cfg.c0, *cfg.c1) + tier_cost);
    });
    CHECK(model_best == doctest::Approx(direct_best).epsilon(1e-9));
    const auto r = solve(inst.data, inst.set, cfg);
    CHECK(r.objective.total() == doctest::Approx(direct_best).epsilon(1e-9));
    const auto v = verify_solution(m, assignment_for(m, inst.data, inst.set, r.best.coefficients), inst.data, &inst.set);
    CHECK(v.objective.total() == doctest::Approx(direct_best).epsilon(1e-9));
  }
}
