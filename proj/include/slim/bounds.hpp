#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "slim/coefset.hpp"

namespace slim {

using BigInt = boost::multiprecision::cpp_int;

/// Finite-class generalization bound: with probability at least 1 - delta,
/// true risk <= empirical risk + bound_gap for every classifier in the class.
struct BoundReport {
  int theorem = 1;
  BigInt hypothesis_count;  ///< |L| for theorem 1, the Farey-point count for theorem 2
  double delta = 0.0;
  std::int64_t n = 0;
  double bound_gap = 0.0;
};

/// Product of the domain sizes.
BigInt lattice_size(const CoefficientSet& s);
/// Natural log of a positive integer of any size.
double log_big(const BigInt& x);

/// sqrt((ln(count + 1) - ln delta) / (2n)), 0 < delta < 1.
BoundReport theorem1(const BigInt& lattice_count, std::int64_t n, double delta);
double theorem1_gap(const CoefficientSet& s, std::int64_t n, double delta);
/// Theorem 1 for the lattice {-lambda..lambda}^p.
double theorem1_gap(std::int64_t lambda, int p, std::int64_t n, double delta);

/// mu(0..upto), mu(0) = 0.
std::vector<int> mobius_table(std::int64_t upto);

/// Number of points v/q in [0,1)^p with 0 < q <= lambda and gcd(v_1, ..., v_p, q) = 1,
/// as sum over q of sum over e | q of mu(e) (q/e)^p.
BigInt farey_count(std::int64_t lambda, int p);

/// sqrt((ln farey_count - ln delta) / (2n)), 0 < delta <= 1.
BoundReport theorem2(std::int64_t lambda, int p, std::int64_t n, double delta);
double theorem2_gap(std::int64_t lambda, int p, std::int64_t n, double delta);

std::string to_string(const BigInt& x);

}  // namespace slim
