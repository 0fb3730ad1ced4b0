#include "symcurv/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "symcurv/errors.hpp"

namespace symcurv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw DomainError("not a number: '" + std::string(whole) + "'");
  BigInt value = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw DomainError("not a number: '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return negative ? BigInt(-value) : value;
}

BigInt pow10(long e) {
  BigInt p = 1;
  for (long i = 0; i < e; ++i) p *= 10;
  return p;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw DomainError("not a number: empty value");

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_integer(trim(s.substr(0, slash)), s);
    const BigInt den = parse_integer(trim(s.substr(slash + 1)), s);
    if (den == 0) throw DomainError("zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }

  std::string_view rest = s;
  bool negative = false;
  if (rest.front() == '+' || rest.front() == '-') {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  BigInt mantissa = 0;
  long scale = 0;
  bool seen_digit = false;
  bool in_fraction = false;
  std::size_t pos = 0;
  for (; pos < rest.size(); ++pos) {
    const char c = rest[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      seen_digit = true;
      if (in_fraction) --scale;
    } else if (c == '.' && !in_fraction) {
      in_fraction = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw DomainError("not a number: '" + std::string(s) + "'");
  if (pos < rest.size()) {
    if (rest[pos] != 'e' && rest[pos] != 'E') {
      throw DomainError("not a number: '" + std::string(s) + "'");
    }
    const BigInt e = parse_integer(rest.substr(pos + 1), s);
    if (abs(e) > 4000) throw DomainError("exponent out of range in '" + std::string(s) + "'");
    scale += e.convert_to<long>();
  }
  if (negative) mantissa = -mantissa;
  if (scale >= 0) return Rational(mantissa * pow10(scale));
  return Rational(mantissa, pow10(-scale));
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) throw DomainError("to_rational: value must be finite");
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an exact integer.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r(scaled);
  if (exponent > 0) {
    r *= Rational(BigInt(1) << exponent);
  } else if (exponent < 0) {
    r /= Rational(BigInt(1) << -exponent);
  }
  return r;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace symcurv
