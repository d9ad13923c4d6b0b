#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "slim/coefset.hpp"
#include "slim/dataset.hpp"

namespace slim {

/// Penalties, class weights and solver budgets.
struct SlimConfig {
  double c0 = 0.01;            ///< per nonzero coefficient, in units of training error
  std::optional<double> c1;    ///< per unit of |lambda|; unset means default_c1()
  double w_plus = 1.0;
  double w_minus = 1.0;
  double gamma = 0.1;          ///< margin used by the exported Big-M loss constraints
  double time_budget_s = 60.0;
  double gap_tolerance = 0.0;
  std::uint64_t node_limit = 0;  ///< 0 = unlimited
  int workers = 1;
  /// Stop as soon as the incumbent objective is at or below this value.
  std::optional<double> stop_at_objective;

  void validate() const;
};

/// Objective values are kept as integer ticks of 1e-24 so that every
/// comparison in the search is exact.
using Ticks = __int128;
inline constexpr long double kTicksPerUnit = 1e24L;

Ticks to_ticks(double value);
double from_ticks(Ticks t);

struct ObjectiveValue {
  Ticks loss = 0;
  Ticks l0 = 0;
  Ticks l1 = 0;
  Ticks pilm = 0;
  Eigen::Index misclassified_count = 0;
  Eigen::Index misclassified_pos = 0;
  Eigen::Index misclassified_neg = 0;
  Eigen::Index nnz = 0;

  Ticks total_ticks() const { return loss + l0 + l1 + pilm; }
  double total() const { return from_ticks(total_ticks()); }
  double loss_term() const { return from_ticks(loss); }
  double l0_term() const { return from_ticks(l0); }
  double l1_term() const { return from_ticks(l1); }
  double pilm_term() const { return from_ticks(pilm); }
};

/// Tick-valued cost tables shared by evaluate(), the solver and the MIP checker.
class ObjectiveCosts {
 public:
  ObjectiveCosts(const Dataset& d, const SlimConfig& cfg, const CoefficientSet* set);

  Ticks loss_weight(int label) const { return label == 1 ? loss_pos_ : loss_neg_; }
  Ticks c0() const { return c0_; }
  /// Cost of one 1e-9 unit of |lambda_j|.
  Ticks c1_per_nano() const { return c1_nano_; }
  double c1() const { return c1_; }
  Ticks l1_cost(const Decimal& v) const;
  /// C0 * [v != 0] + C1 * |v| + tier cost of v on coefficient j.
  Ticks penalty(Eigen::Index j, const Decimal& v) const;
  Ticks tier_cost(Eigen::Index j, const Decimal& v) const;

 private:
  const CoefficientSet* set_;
  Ticks loss_pos_ = 0;
  Ticks loss_neg_ = 0;
  Ticks c0_ = 0;
  Ticks c1_nano_ = 0;
  double c1_ = 0.0;
};

/// C1 from the config, or default_c1() when unset.
double resolve_c1(const SlimConfig& cfg, Eigen::Index n, const CoefficientSet* set);

/// Weighted 0-1 loss plus L0, L1 and tier penalties. A score of exactly 0 is
/// a misclassification. `set` supplies tiers and the default C1.
ObjectiveValue evaluate(const Dataset& d, const Eigen::Ref<const Eigen::VectorXd>& lambda, const SlimConfig& cfg,
                        const CoefficientSet* set = nullptr);

/// W+ = N / (2 |I+|), W- = N / (2 |I-|).
std::pair<double, double> default_weights(const Dataset& d);

/// 0.5 * min(1/N, C0) / max_l1(s).
double default_c1(Eigen::Index n, double c0, const CoefficientSet& s);

/// [1/N, 1]: below 1/N there is no sparsity pressure, above 1 the zero model wins.
std::pair<double, double> c0_range(Eigen::Index n);

/// Exact scores x_i . lambda, as ratios over 10^(feature scale + lambda scale).
/// Only the sign is meaningful to callers that need exactness.
std::vector<__int128> exact_scores(const Dataset& d, const std::vector<Decimal>& lambda, int lambda_scale);

/// sign(x_i . lambda) with 0 mapped to -1.
Eigen::VectorXi predict(const Dataset& d, const Eigen::Ref<const Eigen::VectorXd>& lambda);

/// Unweighted share of examples with y_i x_i . lambda <= 0.
double error_rate(const Dataset& d, const Eigen::Ref<const Eigen::VectorXd>& lambda);

}  // namespace slim
