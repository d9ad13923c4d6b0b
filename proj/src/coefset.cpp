#include "slim/coefset.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace slim {

namespace {

void sort_unique(std::vector<Decimal>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// d * 10^e as an exact decimal.
Decimal scaled_digit(int d, int e) {
  if (e >= 0) return Decimal::parse(std::to_string(static_cast<std::int64_t>(d) * pow10_i64(e)));
  return Decimal::parse(std::to_string(d) + "e" + std::to_string(e));
}

Decimal add(const Decimal& a, const Decimal& b) {
  const int s = std::max(a.scale, b.scale);
  return Decimal::parse(std::to_string(a.scaled_to(s) + b.scaled_to(s)) + "e-" + std::to_string(s));
}

}  // namespace

CoefficientDomain::CoefficientDomain(DomainKind kind, std::vector<Decimal> values)
    : kind_(kind), values_(std::move(values)) {
  for (auto& v : values_) v = v.normalized();
  sort_unique(values_);
  if (values_.empty()) throw ArgumentError("coefficient domain is empty");
  if (!std::binary_search(values_.begin(), values_.end(), Decimal{}))
    throw ArgumentError("coefficient domain must contain 0");
  for (const auto& v : values_) scale_ = std::max(scale_, v.scale);
  if (scale_ > Decimal::kMaxScale)
    throw ArgumentError("coefficient values need more than " + std::to_string(Decimal::kMaxScale) + " decimals");
}

CoefficientDomain CoefficientDomain::bounded_integer(std::int64_t max_abs) {
  auto d = signed_integer(Sign::kFree, max_abs);
  d.kind_ = DomainKind::kBoundedInteger;
  return d;
}

CoefficientDomain CoefficientDomain::signed_integer(Sign sign, std::int64_t max_abs) {
  if (max_abs < 0) throw ArgumentError("integer bound must be nonnegative");
  if (max_abs > 1'000'000) throw ArgumentError("integer bound too large to enumerate");
  const std::int64_t lo = sign == Sign::kPositive ? 0 : -max_abs;
  const std::int64_t hi = sign == Sign::kNegative ? 0 : max_abs;
  std::vector<Decimal> values;
  values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t v = lo; v <= hi; ++v) values.push_back(Decimal::from_int(v));
  CoefficientDomain d(DomainKind::kSignedBoundedInteger, std::move(values));
  d.sign_ = sign;
  d.bound_ = max_abs;
  return d;
}

CoefficientDomain CoefficientDomain::significant_digits(int digits, int exponent_min, int exponent_max) {
  if (digits != 1 && digits != 2) throw ArgumentError("significant digits must be 1 or 2");
  if (exponent_min > exponent_max) throw ArgumentError("empty exponent range");
  const int low_exp = digits == 1 ? exponent_min : exponent_min - 1;
  if (low_exp < -Decimal::kMaxScale || exponent_max > 15) throw ArgumentError("exponent range out of bounds");
  std::vector<Decimal> values{Decimal{}};
  for (int e = exponent_min; e <= exponent_max; ++e)
    for (int d1 = -9; d1 <= 9; ++d1) {
      if (digits == 1) {
        values.push_back(scaled_digit(d1, e));
        continue;
      }
      for (int d2 = -9; d2 <= 9; ++d2) values.push_back(add(scaled_digit(d1, e), scaled_digit(d2, e - 1)));
    }
  CoefficientDomain d(DomainKind::kSignificantDigits, std::move(values));
  d.digits_ = digits;
  d.exponent_min_ = exponent_min;
  d.exponent_max_ = exponent_max;
  return d;
}

CoefficientDomain CoefficientDomain::explicit_set(std::vector<Decimal> values) {
  return CoefficientDomain(DomainKind::kExplicitSet, std::move(values));
}

bool CoefficientDomain::contains(const Decimal& v) const { return std::binary_search(values_.begin(), values_.end(), v); }

Decimal CoefficientDomain::max_abs() const { return std::max(values_.front().abs(), values_.back().abs()); }

bool CoefficientDomain::is_integer_range() const {
  if (scale_ != 0) return false;
  return values_.back().mantissa - values_.front().mantissa + 1 == static_cast<std::int64_t>(values_.size());
}

std::string CoefficientDomain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DomainKind::kBoundedInteger:
      os << "integer in [" << -bound_ << ", " << bound_ << "]";
      break;
    case DomainKind::kSignedBoundedInteger:
      os << "integer in [" << min().to_string() << ", " << max().to_string() << "]";
      break;
    case DomainKind::kSignificantDigits:
      os << digits_ << " significant digit" << (digits_ == 2 ? "s" : "") << ", exponent " << exponent_min_ << ".."
         << exponent_max_;
      break;
    case DomainKind::kExplicitSet: {
      os << "{";
      for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? ", " : "") << values_[i].to_string();
      os << "}";
      break;
    }
  }
  return os.str();
}

CoefficientSet::CoefficientSet(std::vector<CoefficientDomain> domains)
    : domains_(std::move(domains)), tiers_(domains_.size()) {}

void CoefficientSet::set_tiers(Eigen::Index j, std::vector<Tier> tiers) {
  const auto& dom = domain(j);
  std::vector<Decimal> seen;
  double previous = 0.0;
  for (auto& t : tiers) {
    for (auto& v : t.values) v = v.normalized();
    if (!(t.cost > previous)) throw ArgumentError("tier costs must be positive and strictly increasing");
    previous = t.cost;
    sort_unique(t.values);
    if (t.values.empty()) throw ArgumentError("empty tier");
    for (const auto& v : t.values) {
      if (!dom.contains(v)) throw ArgumentError("tier value " + v.to_string() + " is not in the domain");
      seen.push_back(v);
    }
  }
  const std::size_t total = seen.size();
  sort_unique(seen);
  if (seen.size() != total) throw ArgumentError("tiers overlap");
  if (!tiers.empty() && seen != dom.values()) throw ArgumentError("tiers do not cover the domain");
  tiers_.at(static_cast<std::size_t>(j)) = std::move(tiers);
}

bool CoefficientSet::has_tiers() const {
  return std::any_of(tiers_.begin(), tiers_.end(), [](const auto& t) { return !t.empty(); });
}

int CoefficientSet::tier_of(Eigen::Index j, const Decimal& v) const {
  const auto& ts = tiers(j);
  for (std::size_t r = 0; r < ts.size(); ++r)
    if (std::binary_search(ts[r].values.begin(), ts[r].values.end(), v)) return static_cast<int>(r) + 1;
  return 0;
}

double CoefficientSet::tier_cost(Eigen::Index j, const Decimal& v) const {
  const int r = tier_of(j, v);
  return r == 0 ? 0.0 : tiers(j)[static_cast<std::size_t>(r - 1)].cost;
}

int CoefficientSet::scale() const {
  int s = 0;
  for (const auto& d : domains_) s = std::max(s, d.scale());
  return s;
}

std::vector<Decimal> enumerate(const CoefficientDomain& domain) { return domain.values(); }

std::vector<Decimal> to_decimals(const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  std::vector<Decimal> out;
  out.reserve(static_cast<std::size_t>(lambda.size()));
  for (Eigen::Index j = 0; j < lambda.size(); ++j) out.push_back(Decimal::from_double(lambda(j)));
  return out;
}

bool contains(const CoefficientSet& s, const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  if (lambda.size() != s.p())
    throw ArgumentError("coefficient vector has length " + std::to_string(lambda.size()) + ", expected " +
                        std::to_string(s.p()));
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    if (!std::isfinite(lambda(j))) return false;
    Decimal v;
    try {
      v = Decimal::from_double(lambda(j));
    } catch (const Error&) {
      return false;
    }
    if (!s.domain(j).contains(v)) return false;
  }
  return true;
}

double max_l1(const CoefficientSet& s) {
  const int scale = s.scale();
  std::int64_t total = 0;
  for (const auto& d : s.domains()) total += d.max_abs().scaled_to(scale);
  return static_cast<double>(total) / static_cast<double>(pow10_i64(scale));
}

}  // namespace slim
