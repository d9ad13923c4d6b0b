#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace slim {

/// Exact finite decimal: mantissa * 10^-scale, normalized so the mantissa has
/// no trailing zeros when scale > 0.
struct Decimal {
  std::int64_t mantissa = 0;
  int scale = 0;

  static constexpr int kMaxScale = 9;

  /// Parses "12", "-0.25", "1e-3", "+4.50". Throws ParseError on anything else.
  static Decimal parse(std::string_view text);
  /// Shortest round-trip representation of a double, then parsed exactly.
  static Decimal from_double(double value);
  static Decimal from_int(std::int64_t value) { return {value, 0}; }

  /// mantissa rescaled to 10^-target_scale; throws ArgumentError if that
  /// would lose digits or overflow.
  std::int64_t scaled_to(int target_scale) const;

  double to_double() const;
  std::string to_string() const;
  bool is_integer() const { return scale == 0; }
  bool is_zero() const { return mantissa == 0; }

  /// Same value with trailing fractional zeros removed.
  Decimal normalized() const {
    Decimal d = *this;
    while (d.scale > 0 && d.mantissa % 10 == 0) {
      d.mantissa /= 10;
      --d.scale;
    }
    if (d.mantissa == 0) d.scale = 0;
    return d;
  }
  Decimal abs() const { return {mantissa < 0 ? -mantissa : mantissa, scale}; }
  Decimal operator-() const { return {-mantissa, scale}; }

  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b) {
    return a.mantissa == b.mantissa && a.scale == b.scale;
  }
};

std::int64_t pow10_i64(int exponent);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace slim
