#include "fairbandit/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace fairbandit {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  Integer value{std::string(s)};
  return negative ? Integer(-value) : value;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    Integer exp_value = parse_integer(exp_text, whole);
    if (abs(exp_value) > 4096) {
      throw std::invalid_argument("exponent out of range in '" + std::string(whole) + "'");
    }
    exponent = exp_value.convert_to<long>();
    s = s.substr(0, e);
  }
  std::string digits;
  auto dot_pos = s.find('.');
  if (dot_pos == std::string_view::npos) {
    digits = std::string(s);
  } else {
    std::string_view int_part = s.substr(0, dot_pos);
    std::string_view frac_part = s.substr(dot_pos + 1);
    if (int_part.empty() && frac_part.empty()) digits.clear();
    else {
      digits = std::string(int_part) + std::string(frac_part);
      exponent -= static_cast<long>(frac_part.size());
    }
  }
  if (!all_digits(digits)) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  Rational value{Integer(digits)};
  Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0) value *= scale;
  else value /= scale;
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
    return Rational(num, den);
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& value) {
  Integer num = numerator(value);
  Integer den = denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::vector<double> to_doubles(const RationalVector& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(to_double(v));
  return out;
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // 53 bits of mantissa as an exact integer.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational out{Integer(scaled)};
  Integer power = boost::multiprecision::pow(Integer(2), static_cast<unsigned>(std::abs(exponent)));
  if (exponent >= 0) out *= power;
  else out /= power;
  return out;
}

Rational dot(const RationalVector& lhs, const RationalVector& rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("dot: length mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) sum += lhs[i] * rhs[i];
  return sum;
}

Integer common_denominator(const RationalVector& values) {
  Integer acc = 1;
  for (const auto& v : values) {
    Integer den = denominator(v);
    acc = acc / boost::multiprecision::gcd(acc, den) * den;
  }
  return acc;
}

}  // namespace fairbandit
