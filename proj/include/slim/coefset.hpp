#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "slim/decimal.hpp"
#include "slim/errors.hpp"

namespace slim {

enum class DomainKind { kBoundedInteger, kSignedBoundedInteger, kSignificantDigits, kExplicitSet };
enum class Sign { kPositive, kNegative, kFree };

/// Finite admissible value set for one coefficient. Values are exact decimals,
/// sorted ascending, duplicate-free, and always include 0.
class CoefficientDomain {
 public:
  /// {-max_abs, ..., max_abs}
  static CoefficientDomain bounded_integer(std::int64_t max_abs);
  /// {0..max_abs}, {-max_abs..0} or {-max_abs..max_abs}
  static CoefficientDomain signed_integer(Sign sign, std::int64_t max_abs);
  /// digits = 1: {d * 10^E : d in -9..9, E in [exponent_min, exponent_max]}.
  /// digits = 2: {d1 * 10^E + d2 * 10^(E-1) : d1, d2 in -9..9, E in [exponent_min, exponent_max]}.
  static CoefficientDomain significant_digits(int digits, int exponent_min, int exponent_max);
  static CoefficientDomain explicit_set(std::vector<Decimal> values);

  DomainKind kind() const { return kind_; }
  const std::vector<Decimal>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  /// Largest fractional digit count among the values.
  int scale() const { return scale_; }

  bool contains(const Decimal& v) const;
  Decimal min() const { return values_.front(); }
  Decimal max() const { return values_.back(); }
  Decimal max_abs() const;
  /// Integer-valued and gap-free, so integer bounds describe it exactly.
  bool is_integer_range() const;

  // Construction parameters, kept for descriptions and JSON output.
  Sign sign() const { return sign_; }
  std::int64_t bound() const { return bound_; }
  int digits() const { return digits_; }
  int exponent_min() const { return exponent_min_; }
  int exponent_max() const { return exponent_max_; }

  std::string describe() const;

 private:
  CoefficientDomain(DomainKind kind, std::vector<Decimal> values);

  DomainKind kind_;
  std::vector<Decimal> values_;
  int scale_ = 0;
  Sign sign_ = Sign::kFree;
  std::int64_t bound_ = 0;
  int digits_ = 0;
  int exponent_min_ = 0;
  int exponent_max_ = 0;
};

/// Interpretability tier: a subset of one coefficient's domain with a cost.
struct Tier {
  std::vector<Decimal> values;
  double cost = 0.0;
};

/// Per-coefficient domains plus optional tiers (tier r is tiers[r-1]).
class CoefficientSet {
 public:
  CoefficientSet() = default;
  explicit CoefficientSet(std::vector<CoefficientDomain> domains);

  static CoefficientSet uniform(Eigen::Index p, const CoefficientDomain& domain) {
    return CoefficientSet(std::vector<CoefficientDomain>(static_cast<std::size_t>(p), domain));
  }

  Eigen::Index p() const { return static_cast<Eigen::Index>(domains_.size()); }
  const CoefficientDomain& domain(Eigen::Index j) const { return domains_.at(static_cast<std::size_t>(j)); }
  const std::vector<CoefficientDomain>& domains() const { return domains_; }
  CoefficientDomain& mutable_domain(Eigen::Index j) { return domains_.at(static_cast<std::size_t>(j)); }

  /// Tiers must be disjoint, cover the domain, and have strictly increasing positive costs.
  void set_tiers(Eigen::Index j, std::vector<Tier> tiers);
  const std::vector<Tier>& tiers(Eigen::Index j) const { return tiers_.at(static_cast<std::size_t>(j)); }
  bool has_tiers() const;

  /// Cost of the tier containing v on coefficient j; 0 when j has no tiers.
  double tier_cost(Eigen::Index j, const Decimal& v) const;
  /// 1-based tier id of v on coefficient j, or 0 when j has no tiers.
  int tier_of(Eigen::Index j, const Decimal& v) const;

  /// Largest fractional digit count over every domain.
  int scale() const;

 private:
  std::vector<CoefficientDomain> domains_;
  std::vector<std::vector<Tier>> tiers_;
};

/// Sorted value list of a domain.
std::vector<Decimal> enumerate(const CoefficientDomain& domain);

/// True iff every lambda_j is a member of domain j.
bool contains(const CoefficientSet& s, const Eigen::Ref<const Eigen::VectorXd>& lambda);

/// Sum over coefficients of the largest |value|.
double max_l1(const CoefficientSet& s);

/// Exact decimal image of a coefficient vector.
std::vector<Decimal> to_decimals(const Eigen::Ref<const Eigen::VectorXd>& lambda);

/// Divides an integer vector by the gcd of its absolute values. The zero vector
/// is returned unchanged. Floating inputs must hold integral values.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> coprime_reduce(const Eigen::MatrixBase<Derived>& lambda) {
  using Scalar = typename Derived::Scalar;
  std::int64_t g = 0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const Scalar v = lambda(j);
    if constexpr (std::is_floating_point_v<Scalar>) {
      if (!std::isfinite(v) || std::trunc(v) != v || std::abs(v) > 9.0e15)
        throw ArgumentError("coprime_reduce needs integer entries");
    }
    const auto iv = static_cast<std::int64_t>(v);
    g = std::gcd(g, iv < 0 ? -iv : iv);
  }
  if (g <= 1) return lambda;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(lambda.size());
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    out(j) = static_cast<Scalar>(static_cast<std::int64_t>(lambda(j)) / g);
  return out;
}

}  // namespace slim
