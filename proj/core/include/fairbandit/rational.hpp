#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fairbandit {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// Parses "a/b", "a" or a plain decimal literal such as "0.75" or "-1.5e-2"
/// into an exact rational. Throws std::invalid_argument on malformed text or a
/// zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "numerator/denominator" form; integers print without "/1".
std::string to_string(const Rational& value);

double to_double(const Rational& value);

std::vector<double> to_doubles(const RationalVector& values);

/// Exact rational value of a finite double (every double is a dyadic rational).
Rational from_double(double value);

Rational dot(const RationalVector& lhs, const RationalVector& rhs);

/// Least common multiple of the denominators of `values` (1 for an empty list).
Integer common_denominator(const RationalVector& values);

}  // namespace fairbandit
