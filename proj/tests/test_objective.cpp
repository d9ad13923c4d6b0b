#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slim/errors.hpp"
#include "slim/io.hpp"
#include "slim/objective.hpp"

using namespace slim;
using slim::testing::reference_objective;

namespace {

Dataset labels_only(int n, int positives) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXi y = Eigen::VectorXi::Constant(n, -1);
  y.head(positives).setConstant(1);
  return Dataset(x, y, {"a"});
}

}  // namespace

TEST_CASE("single example terms") {
  Eigen::MatrixXd x(1, 2);
  x << 1, 1;
  const Dataset d(x, Eigen::VectorXi::Constant(1, 1), {"a", "b"});
  SlimConfig cfg;
  cfg.c0 = 0.1;
  cfg.c1 = 0.001;
  const auto v = evaluate(d, Eigen::Vector2d(1, 0), cfg);
  CHECK(v.loss_term() == 0);
  CHECK(v.l0_term() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(v.l1_term() == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(v.total() == doctest::Approx(0.101).epsilon(1e-15));
  CHECK(v.nnz == 1);
}

TEST_CASE("zero score is a misclassification") {
  Eigen::MatrixXd x(2, 2);
  x << 1, -1, 1, 1;
  Eigen::VectorXi y(2);
  y << 1, -1;
  const Dataset d(x, y, {"a", "b"});
  SlimConfig cfg;
  cfg.c0 = 0;
  cfg.c1 = 0;
  const auto v = evaluate(d, Eigen::Vector2d(1, 1), cfg);
  CHECK(v.misclassified_count == 2);
  CHECK(v.misclassified_pos == 1);
  CHECK(v.loss_term() == 1.0);
  CHECK(error_rate(d, Eigen::Vector2d(1, 1)) == 1.0);
  CHECK(predict(d, Eigen::Vector2d(1, 1)) == Eigen::Vector2i(-1, 1));
}

TEST_CASE("evaluate agrees with a long double reference") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    auto inst = slim::testing::random_instance(rng, 20, 5, 7);
    SlimConfig cfg;
    cfg.c0 = std::uniform_real_distribution<double>(0.001, 0.2)(rng);
    cfg.c1 = std::uniform_real_distribution<double>(0.0, 0.01)(rng);
    cfg.w_plus = std::uniform_real_distribution<double>(0.5, 2)(rng);
    cfg.w_minus = std::uniform_real_distribution<double>(0.5, 2)(rng);
    slim::testing::for_each_lattice_point(inst.set, [&](const Eigen::VectorXd& lam) {
      if (std::uniform_int_distribution<int>(0, 20)(rng) != 0) return;
      const double got = evaluate(inst.data, lam, cfg, &inst.set).total();
      const double want = reference_objective(inst.data, lam, cfg.c0, *cfg.c1, cfg.w_plus, cfg.w_minus);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    });
  }
}

TEST_CASE("mammo model error") {
  LoadOptions o;
  o.label_column = "Malignant";
  const auto d = load_csv(std::string(SLIM_DATA_DIR) + "/mammo.csv", o);
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(d.p());
  lam(*d.intercept_index()) = 1;
  lam(*d.find_feature("OvalShape")) = -2;
  lam(*d.find_feature("CircumscribedMargin")) = -2;
  CHECK(std::abs(error_rate(d, lam) - 0.208) <= 0.03);
}

TEST_CASE("default weights") {
  auto [wp, wm] = default_weights(labels_only(100, 50));
  CHECK(wp == 1.0);
  CHECK(wm == 1.0);
  std::tie(wp, wm) = default_weights(labels_only(100, 20));
  CHECK(wp == 2.5);
  CHECK(wm == 0.625);
  std::tie(wp, wm) = default_weights(labels_only(558, 106));
  CHECK(wp == doctest::Approx(558.0 / 212));
  CHECK(wm == doctest::Approx(558.0 / 904));
  CHECK_THROWS_AS(default_weights(labels_only(10, 0)), DegenerateDataError);
}

TEST_CASE("default C1 and the C0 range") {
  CHECK(default_c1(100, 0.01, CoefficientSet::uniform(3, CoefficientDomain::bounded_integer(10))) ==
        doctest::Approx(0.5 * 0.01 / 30));
  CHECK(default_c1(10, 1, CoefficientSet::uniform(1, CoefficientDomain::bounded_integer(10))) ==
        doctest::Approx(0.005));
  for (int n : {1, 7, 50, 683}) {
    const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(4));
    CHECK(default_c1(n, 2.0 / n, s) == doctest::Approx(0.5 / (n * 8.0)));
  }
  CHECK(c0_range(683).first == doctest::Approx(1.0 / 683));
  CHECK(c0_range(683).second == 1.0);
  CHECK(c0_range(1) == std::pair<double, double>{1.0, 1.0});
  CHECK(c0_range(306).first == doctest::Approx(0.00327).epsilon(1e-3));
}

TEST_CASE("model JSON round trip") {
  ScoringSystem m;
  m.coefficients = Eigen::Vector3d(-10, 1, 0.5);
  m.feature_names = {kInterceptName, "a", "b"};
  m.intercept_index = 0;
  m.provenance = {"abc", "def", "optimal"};
  const auto j = model_to_json(m, {{"seed", 0}});
  CHECK(j["intercept"] == -10);
  CHECK(j["features"].size() == 2);
  CHECK(j["meta"]["seed"] == 0);
  const auto back = model_from_json(j);
  CHECK(back.coefficients == m.coefficients);
  CHECK(back.feature_names == m.feature_names);
  CHECK(back.intercept_index == m.intercept_index);
  CHECK(back.provenance.solve_status == "optimal");

  const auto path = (std::filesystem::temp_directory_path() / "slim_model_roundtrip.json").string();
  save_model(m, path);
  CHECK(load_model(path).coefficients == m.coefficients);
  std::filesystem::remove(path);
  CHECK_THROWS(model_from_json(nlohmann::json::parse(R"({"features": 3})")));
}
