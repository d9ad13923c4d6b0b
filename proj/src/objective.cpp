#include "slim/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slim/errors.hpp"

namespace slim {

namespace {

constexpr Ticks kNanoPerUnit = 1'000'000'000;

Ticks div_round(Ticks num, Ticks den) {
  const Ticks q = num / den;
  const Ticks r = num % den;
  return (2 * (r < 0 ? -r : r) >= den) ? q + (num < 0 ? -1 : 1) : q;
}

}  // namespace

void SlimConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(c0)) throw ArgumentError("C0 must be finite and nonnegative");
  if (c1 && !finite_nonneg(*c1)) throw ArgumentError("C1 must be finite and nonnegative");
  if (!finite_nonneg(w_plus) || !finite_nonneg(w_minus)) throw ArgumentError("class weights must be finite and nonnegative");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be positive");
  if (!(time_budget_s > 0.0)) throw ArgumentError("time budget must be positive");
  if (!(gap_tolerance >= 0.0 && gap_tolerance <= 1.0)) throw ArgumentError("gap tolerance must lie in [0, 1]");
  if (workers < 1) throw ArgumentError("worker count must be at least 1");
}

Ticks to_ticks(double value) {
  if (!std::isfinite(value)) throw ArgumentError("non-finite objective weight");
  if (std::fabs(value) > 1.0e6) throw ArgumentError("objective weight too large");
  // Split so each half fits a long long.
  const long double scaled = static_cast<long double>(value) * kTicksPerUnit;
  const long double high = std::truncl(scaled / 1e12L);
  const long double low = scaled - high * 1e12L;
  return static_cast<Ticks>(static_cast<long long>(high)) * static_cast<Ticks>(1'000'000'000'000LL) +
         static_cast<Ticks>(std::llroundl(low));
}

double from_ticks(Ticks t) { return static_cast<double>(static_cast<long double>(t) / kTicksPerUnit); }

double resolve_c1(const SlimConfig& cfg, Eigen::Index n, const CoefficientSet* set) {
  if (cfg.c1) return *cfg.c1;
  if (!set) throw ArgumentError("C1 is unset and no coefficient set was given to derive the default");
  if (cfg.c0 <= 0.0) throw ArgumentError("default C1 needs C0 > 0");
  return default_c1(n, cfg.c0, *set);
}

ObjectiveCosts::ObjectiveCosts(const Dataset& d, const SlimConfig& cfg, const CoefficientSet* set) : set_(set) {
  cfg.validate();
  const auto n = static_cast<Ticks>(d.n());
  loss_pos_ = div_round(to_ticks(cfg.w_plus), n);
  loss_neg_ = div_round(to_ticks(cfg.w_minus), n);
  c0_ = to_ticks(cfg.c0);
  c1_ = resolve_c1(cfg, d.n(), set);
  c1_nano_ = div_round(to_ticks(c1_), kNanoPerUnit);
}

Ticks ObjectiveCosts::l1_cost(const Decimal& v) const {
  return c1_nano_ * static_cast<Ticks>(v.abs().scaled_to(Decimal::kMaxScale));
}

Ticks ObjectiveCosts::tier_cost(Eigen::Index j, const Decimal& v) const {
  if (!set_ || set_->tiers(j).empty()) return 0;
  return to_ticks(set_->tier_cost(j, v));
}

Ticks ObjectiveCosts::penalty(Eigen::Index j, const Decimal& v) const {
  return (v.is_zero() ? Ticks{0} : c0_) + l1_cost(v) + tier_cost(j, v);
}

std::vector<__int128> exact_scores(const Dataset& d, const std::vector<Decimal>& lambda, int lambda_scale) {
  std::vector<std::int64_t> scaled(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) scaled[j] = lambda[j].scaled_to(lambda_scale);
  std::vector<__int128> out(static_cast<std::size_t>(d.n()), 0);
  const auto& x = d.scaled_features();
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const auto v = scaled[static_cast<std::size_t>(j)];
    if (v == 0) continue;
    for (Eigen::Index i = 0; i < d.n(); ++i) out[static_cast<std::size_t>(i)] += static_cast<__int128>(x(i, j)) * v;
  }
  return out;
}

ObjectiveValue evaluate(const Dataset& d, const Eigen::Ref<const Eigen::VectorXd>& lambda, const SlimConfig& cfg,
                        const CoefficientSet* set) {
  if (lambda.size() != d.p())
    throw ArgumentError("coefficient vector has length " + std::to_string(lambda.size()) + ", expected " +
                        std::to_string(d.p()));
  if (set && set->p() != d.p()) throw ArgumentError("coefficient set size does not match the dataset");
  const ObjectiveCosts costs(d, cfg, set);
  const auto exact = to_decimals(lambda);
  int scale = 0;
  for (const auto& v : exact) scale = std::max(scale, v.scale);
  if (scale > Decimal::kMaxScale) throw ArgumentError("coefficients need more than 9 decimals");

  ObjectiveValue out;
  const auto scores = exact_scores(d, exact, scale);
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const int y = d.labels()(i);
    const auto margin = y == 1 ? scores[static_cast<std::size_t>(i)] : -scores[static_cast<std::size_t>(i)];
    if (margin <= 0) {
      ++out.misclassified_count;
      (y == 1 ? out.misclassified_pos : out.misclassified_neg)++;
    }
  }
  out.loss = costs.loss_weight(1) * out.misclassified_pos + costs.loss_weight(-1) * out.misclassified_neg;
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const auto& v = exact[static_cast<std::size_t>(j)];
    if (!v.is_zero()) {
      ++out.nnz;
      out.l0 += costs.c0();
    }
    out.l1 += costs.l1_cost(v);
    if (set) out.pilm += costs.tier_cost(j, v);
  }
  return out;
}

std::pair<double, double> default_weights(const Dataset& d) {
  const auto pos = d.positives();
  const auto neg = d.negatives();
  if (pos == 0 || neg == 0) throw DegenerateDataError("default weights need both classes present");
  const auto n = static_cast<double>(d.n());
  return {n / (2.0 * static_cast<double>(pos)), n / (2.0 * static_cast<double>(neg))};
}

double default_c1(Eigen::Index n, double c0, const CoefficientSet& s) {
  if (n < 1) throw ArgumentError("N must be at least 1");
  if (!(c0 > 0.0)) throw ArgumentError("default C1 needs C0 > 0");
  const double l1 = max_l1(s);
  if (!(l1 > 0.0)) throw ArgumentError("default C1 is undefined when every domain is {0}");
  return 0.5 * std::min(1.0 / static_cast<double>(n), c0) / l1;
}

std::pair<double, double> c0_range(Eigen::Index n) {
  if (n < 1) throw ArgumentError("N must be at least 1");
  return {1.0 / static_cast<double>(n), 1.0};
}

Eigen::VectorXi predict(const Dataset& d, const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  if (lambda.size() != d.p()) throw ArgumentError("coefficient vector length mismatch");
  const auto exact = to_decimals(lambda);
  int scale = 0;
  for (const auto& v : exact) scale = std::max(scale, v.scale);
  const auto scores = exact_scores(d, exact, scale);
  Eigen::VectorXi out(d.n());
  for (Eigen::Index i = 0; i < d.n(); ++i) out(i) = scores[static_cast<std::size_t>(i)] > 0 ? 1 : -1;
  return out;
}

double error_rate(const Dataset& d, const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  if (lambda.size() != d.p()) throw ArgumentError("coefficient vector length mismatch");
  const auto exact = to_decimals(lambda);
  int scale = 0;
  for (const auto& v : exact) scale = std::max(scale, v.scale);
  const auto scores = exact_scores(d, exact, scale);
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < d.n(); ++i) wrong += d.labels()(i) * scores[static_cast<std::size_t>(i)] <= 0;
  return static_cast<double>(wrong) / static_cast<double>(d.n());
}

}  // namespace slim
