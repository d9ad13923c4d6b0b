#include "lattice.hpp"

#include <algorithm>
#include <cmath>

#include "slim/errors.hpp"

namespace slim::detail {

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) {
  i128 q = a / b;
  if (a % b != 0 && ((a < 0) == (b < 0))) ++q;
  return q;
}

std::shared_ptr<const Lattice> Lattice::build(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg) {
  if (s.p() != d.p())
    throw ArgumentError("coefficient set has " + std::to_string(s.p()) + " domains for " + std::to_string(d.p()) +
                        " features");
  for (Eigen::Index j = 0; j < s.p(); ++j)
    if (s.domain(j).size() == 0) throw ArgumentError("empty domain for coefficient " + std::to_string(j));

  const ObjectiveCosts costs(d, cfg, &s);
  auto lat = std::make_shared<Lattice>();
  lat->n = d.n();
  lat->p = d.p();
  lat->coef_scale = s.scale();
  lat->c1 = costs.c1();

  lat->signed_features = d.scaled_features();
  for (Eigen::Index i = 0; i < d.n(); ++i)
    if (d.labels()(i) == -1) lat->signed_features.row(i) *= -1;

  long double worst = 0.0L;
  lat->values.resize(static_cast<std::size_t>(d.p()));
  lat->decimals.resize(static_cast<std::size_t>(d.p()));
  lat->penalty.resize(static_cast<std::size_t>(d.p()));
  lat->l1_nano.resize(static_cast<std::size_t>(d.p()));
  lat->best_case.resize(static_cast<std::size_t>(d.p()));
  lat->zero_index.resize(static_cast<std::size_t>(d.p()));
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const auto& dom = s.domain(j);
    lat->decimals[ju] = dom.values();
    for (const auto& v : dom.values()) {
      lat->values[ju].push_back(v.scaled_to(lat->coef_scale));
      lat->penalty[ju].push_back(costs.penalty(j, v));
      lat->l1_nano[ju].push_back(static_cast<i128>(v.abs().scaled_to(Decimal::kMaxScale)));
    }
    lat->zero_index[ju] = lat->index_of(j, Decimal{});
    const auto vmin = lat->values[ju].front();
    const auto vmax = lat->values[ju].back();
    const auto col = lat->signed_features.col(j);
    worst += static_cast<long double>(col.cwiseAbs().maxCoeff()) *
             static_cast<long double>(std::max(std::abs(vmin), std::abs(vmax)));
    auto& best = lat->best_case[ju];
    best.resize(static_cast<std::size_t>(d.n()));
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      const i128 m = col(i);
      best[static_cast<std::size_t>(i)] = m >= 0 ? m * vmax : m * vmin;
    }
  }
  if (worst > 1.0e37L) throw SizeError("feature and coefficient magnitudes overflow exact score arithmetic");

  lat->weight.resize(static_cast<std::size_t>(d.n()));
  for (Eigen::Index i = 0; i < d.n(); ++i) lat->weight[static_cast<std::size_t>(i)] = costs.loss_weight(d.labels()(i));
  return lat;
}

std::size_t Lattice::index_of(Eigen::Index j, const Decimal& v) const {
  const auto& dec = decimals[static_cast<std::size_t>(j)];
  const auto it = std::lower_bound(dec.begin(), dec.end(), v);
  if (it == dec.end() || !(*it == v))
    throw ArgumentError("value " + v.to_string() + " is not in the domain of coefficient " + std::to_string(j));
  return static_cast<std::size_t>(it - dec.begin());
}

void loss_profile(std::span<const i128> base, const std::int64_t* column, std::span<const std::int64_t> values,
                  std::span<const Ticks> weight, std::vector<Ticks>& out) {
  const std::size_t nv = values.size();
  std::vector<Ticks> diff(nv + 1, 0);
  Ticks constant = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const i128 m = column[i];
    const i128 c = -base[i];
    const Ticks w = weight[i];
    if (m == 0) {
      if (c >= 0) constant += w;
    } else if (m > 0) {
      // misclassified iff v <= floor(c / m)
      const i128 u = floor_div(c, m);
      const auto idx = static_cast<std::size_t>(
          std::upper_bound(values.begin(), values.end(), u, [](i128 a, std::int64_t b) { return a < b; }) -
          values.begin());
      diff[0] += w;
      diff[idx] -= w;
    } else {
      // misclassified iff v >= ceil(c / m)
      const i128 l = ceil_div(c, m);
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(values.begin(), values.end(), l, [](std::int64_t a, i128 b) { return a < b; }) -
          values.begin());
      diff[idx] += w;
      diff[nv] -= w;
    }
  }
  out.assign(nv, 0);
  Ticks running = constant;
  for (std::size_t v = 0; v < nv; ++v) {
    running += diff[v];
    out[v] = running;
  }
}

}  // namespace slim::detail
