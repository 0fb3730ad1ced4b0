#pragma once

#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace symcurv {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "3", "-2/7", "0.125" or "1e-3" into an exact rational.
/// Throws DomainError on malformed text.
Rational parse_rational(std::string_view text);

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational to_rational(double value);

double to_double(const Rational& value);

}  // namespace symcurv
