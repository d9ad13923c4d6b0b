#include "slim/bounds.hpp"

#include <cmath>

#include "slim/errors.hpp"

namespace slim {

namespace {

void check_n(std::int64_t n) {
  if (n < 1) throw ArgumentError("sample count must be at least 1");
}

double gap(double log_count, double delta, std::int64_t n) {
  return std::sqrt((log_count - std::log(delta)) / (2.0 * static_cast<double>(n)));
}

void check_lattice(std::int64_t lambda, int p) {
  if (lambda < 1) throw ArgumentError("lambda must be a positive integer");
  if (p < 1) throw ArgumentError("P must be a positive integer");
}

}  // namespace

BigInt lattice_size(const CoefficientSet& s) {
  BigInt count = 1;
  for (const auto& d : s.domains()) count *= static_cast<std::uint64_t>(d.size());
  return count;
}

double log_big(const BigInt& x) {
  if (x <= 0) throw ArgumentError("logarithm of a nonpositive count");
  const auto bits = boost::multiprecision::msb(x);
  if (bits < 900) return std::log(x.convert_to<double>());
  // Keep the leading 64 bits; the rest only moves the result below double precision.
  const auto shift = bits - 63;
  const BigInt head = x >> shift;
  return std::log(head.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

BoundReport theorem1(const BigInt& lattice_count, std::int64_t n, double delta) {
  check_n(n);
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (lattice_count < 1) throw ArgumentError("the coefficient lattice must be nonempty");
  BoundReport r;
  r.theorem = 1;
  r.hypothesis_count = lattice_count;
  r.delta = delta;
  r.n = n;
  r.bound_gap = gap(log_big(lattice_count + 1), delta, n);
  return r;
}

double theorem1_gap(const CoefficientSet& s, std::int64_t n, double delta) {
  return theorem1(lattice_size(s), n, delta).bound_gap;
}

double theorem1_gap(std::int64_t lambda, int p, std::int64_t n, double delta) {
  check_lattice(lambda, p);
  return theorem1(boost::multiprecision::pow(BigInt(2 * lambda + 1), static_cast<unsigned>(p)), n, delta).bound_gap;
}

std::vector<int> mobius_table(std::int64_t upto) {
  if (upto < 0) throw ArgumentError("negative Mobius table size");
  const auto size = static_cast<std::size_t>(upto) + 1;
  std::vector<int> mu(size, 1);
  std::vector<bool> composite(size, false);
  if (size > 0) mu[0] = 0;
  for (std::size_t i = 2; i < size; ++i) {
    if (composite[i]) continue;
    for (std::size_t k = i; k < size; k += i) {
      if (k > i) composite[k] = true;
      mu[k] = -mu[k];
    }
    const std::size_t sq = i * i;
    for (std::size_t k = sq; k < size && sq / i == i; k += sq) mu[k] = 0;
  }
  return mu;
}

BigInt farey_count(std::int64_t lambda, int p) {
  check_lattice(lambda, p);
  if (lambda > 10'000'000) throw SizeError("lambda too large for Farey counting");
  const auto mu = mobius_table(lambda);
  // Group by m = q / e: sum over e of mu(e) * sum over m <= lambda / e of m^p.
  std::vector<BigInt> power_prefix(static_cast<std::size_t>(lambda) + 1, 0);
  for (std::int64_t m = 1; m <= lambda; ++m)
    power_prefix[static_cast<std::size_t>(m)] =
        power_prefix[static_cast<std::size_t>(m - 1)] + boost::multiprecision::pow(BigInt(m), static_cast<unsigned>(p));
  BigInt total = 0;
  for (std::int64_t e = 1; e <= lambda; ++e) {
    const int sign = mu[static_cast<std::size_t>(e)];
    if (sign == 0) continue;
    const auto& part = power_prefix[static_cast<std::size_t>(lambda / e)];
    if (sign > 0)
      total += part;
    else
      total -= part;
  }
  return total;
}

BoundReport theorem2(std::int64_t lambda, int p, std::int64_t n, double delta) {
  check_n(n);
  if (!(delta > 0.0 && delta <= 1.0)) throw ArgumentError("delta must lie in (0, 1]");
  BoundReport r;
  r.theorem = 2;
  r.hypothesis_count = farey_count(lambda, p);
  r.delta = delta;
  r.n = n;
  r.bound_gap = gap(log_big(r.hypothesis_count), delta, n);
  return r;
}

double theorem2_gap(std::int64_t lambda, int p, std::int64_t n, double delta) {
  return theorem2(lambda, p, n, delta).bound_gap;
}

std::string to_string(const BigInt& x) { return x.str(); }

}  // namespace slim
