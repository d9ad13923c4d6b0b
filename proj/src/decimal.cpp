#include "slim/decimal.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "slim/errors.hpp"

namespace slim {

namespace {

constexpr int kMaxParseScale = 18;

using i128 = __int128;

i128 pow10_i128(int exponent) {
  i128 r = 1;
  for (int i = 0; i < exponent; ++i) r *= 10;
  return r;
}

Decimal make_normalized(i128 mantissa, int scale, std::string_view text) {
  while (scale > 0 && mantissa % 10 == 0) {
    mantissa /= 10;
    --scale;
  }
  while (scale < 0) {
    mantissa *= 10;
    ++scale;
    if (mantissa > std::numeric_limits<std::int64_t>::max() ||
        mantissa <= std::numeric_limits<std::int64_t>::min())
      throw ParseError("decimal out of range: '" + std::string(text) + "'");
  }
  if (scale > kMaxParseScale || mantissa > std::numeric_limits<std::int64_t>::max() ||
      mantissa <= std::numeric_limits<std::int64_t>::min())
    throw ParseError("decimal out of range: '" + std::string(text) + "'");
  return {static_cast<std::int64_t>(mantissa), scale};
}

}  // namespace

std::int64_t pow10_i64(int exponent) {
  if (exponent < 0 || exponent > 18) throw ArgumentError("pow10 exponent out of range");
  std::int64_t r = 1;
  for (int i = 0; i < exponent; ++i) r *= 10;
  return r;
}

Decimal Decimal::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty number");

  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  i128 mantissa = 0;
  int scale = 0;
  int digits = 0;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c >= '0' && c <= '9') {
      if (mantissa > pow10_i128(30)) throw ParseError("too many digits: '" + std::string(text) + "'");
      mantissa = mantissa * 10 + (c - '0');
      ++digits;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (digits == 0) throw ParseError("not a number: '" + std::string(text) + "'");
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw ParseError("not a number: '" + std::string(text) + "'");
    ++pos;
    int exponent = 0;
    const auto* first = s.data() + pos;
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last || first == last)
      throw ParseError("not a number: '" + std::string(text) + "'");
    if (exponent > 30 || exponent < -30) throw ParseError("decimal out of range: '" + std::string(text) + "'");
    scale -= exponent;
  }
  if (negative) mantissa = -mantissa;
  return make_normalized(mantissa, scale, text);
}

Decimal Decimal::from_double(double value) {
  if (!std::isfinite(value)) throw ArgumentError("non-finite value has no decimal form");
  return parse(format_double(value));
}

std::int64_t Decimal::scaled_to(int target_scale) const {
  if (target_scale < scale) throw ArgumentError("decimal " + to_string() + " needs more than " +
                                                std::to_string(target_scale) + " fractional digits");
  const i128 v = static_cast<i128>(mantissa) * pow10_i128(target_scale - scale);
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw ArgumentError("decimal " + to_string() + " overflows at scale " + std::to_string(target_scale));
  return static_cast<std::int64_t>(v);
}

double Decimal::to_double() const {
  // Parsing the text gives the correctly rounded double.
  const std::string t = to_string();
  double out = 0.0;
  std::from_chars(t.data(), t.data() + t.size(), out);
  return out;
}

std::string Decimal::to_string() const {
  // parse() never produces INT64_MIN, so negating is safe.
  std::string digits = std::to_string(mantissa < 0 ? -mantissa : mantissa);
  if (scale > 0) {
    if (static_cast<int>(digits.size()) <= scale) digits.insert(0, static_cast<std::size_t>(scale) - digits.size() + 1, '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
  }
  return mantissa < 0 ? "-" + digits : digits;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const int s = std::max(a.scale, b.scale);
  const i128 x = static_cast<i128>(a.mantissa) * pow10_i128(s - a.scale);
  const i128 y = static_cast<i128>(b.mantissa) * pow10_i128(s - b.scale);
  return x < y ? std::strong_ordering::less : (x > y ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw InternalError("to_chars failed");
  return std::string(buf.data(), ptr);
}

}  // namespace slim
