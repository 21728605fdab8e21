#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace tropskel {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Accepts "3", "-2/5" or a decimal literal such as "0.25" (converted exactly).
Rational parse_rational(const std::string& text);

// Exact binary value of a double.
Rational rational_from_double(double x);

double to_double(const Rational& q);

std::string to_string(const Rational& q);

}  // namespace tropskel
