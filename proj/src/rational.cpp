#include "tropskel/rational.hpp"

#include "tropskel/errors.hpp"

#include <cmath>

namespace tropskel {

Rational parse_rational(const std::string& text) {
  if (text.empty()) fail(ErrorKind::ParseError, "empty rational literal");
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) fail(ErrorKind::ParseError, "zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(BigInt(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") {
      fail(ErrorKind::ParseError, "malformed decimal '" + text + "'");
    }
    BigInt den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(BigInt(digits), den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, "malformed rational '" + text + "'");
  }
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "non-finite value");
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // 53 bits of mantissa scaled to an integer.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational q{BigInt(scaled)};
  BigInt pow2 = 1;
  pow2 <<= std::abs(exponent);
  if (exponent >= 0) return q * pow2;
  return q / pow2;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
  auto num = boost::multiprecision::numerator(q);
  auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace tropskel
