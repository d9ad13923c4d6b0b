#pragma once

// Compiled form of (dataset, coefficient set, config) used by the search.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "slim/coefset.hpp"
#include "slim/dataset.hpp"
#include "slim/objective.hpp"

namespace slim::detail {

using i128 = __int128;

struct Lattice {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  int coef_scale = 0;
  double c1 = 0.0;
  /// y_i * x_ij * 10^feature_scale
  MatrixXi64 signed_features;
  /// Per coefficient: domain values * 10^coef_scale, ascending.
  std::vector<std::vector<std::int64_t>> values;
  std::vector<std::vector<Decimal>> decimals;
  std::vector<std::vector<Ticks>> penalty;
  /// |value| in 1e-9 units, for the L1 tie-break.
  std::vector<std::vector<i128>> l1_nano;
  /// Per coefficient, per example: max over the domain of the margin contribution.
  std::vector<std::vector<i128>> best_case;
  std::vector<Ticks> weight;
  std::vector<std::size_t> zero_index;

  static std::shared_ptr<const Lattice> build(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg);

  const std::int64_t* column(Eigen::Index j) const { return signed_features.col(j).data(); }
  std::size_t index_of(Eigen::Index j, const Decimal& v) const;
};

i128 floor_div(i128 a, i128 b);
i128 ceil_div(i128 a, i128 b);

/// out[v] = sum_i weight_i * [base_i + column_i * values[v] <= 0] for every v.
void loss_profile(std::span<const i128> base, const std::int64_t* column, std::span<const std::int64_t> values,
                  std::span<const Ticks> weight, std::vector<Ticks>& out);

}  // namespace slim::detail
