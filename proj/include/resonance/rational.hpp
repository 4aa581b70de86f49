#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace resonance {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

/// Exact value of a finite double.
Rational rational_from_double(double x);

/// `p/q` (or `p` when q == 1).
std::string to_string(const Rational& q);

/// Accepts `p`, `p/q`, and decimal literals such as `0.25` or `-3e-2`.
Rational parse_rational(const std::string& text);

double to_double(const Rational& q);

/// 2^e for any integer e.
Rational pow2(int e);

}  // namespace resonance
