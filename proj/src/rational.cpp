#include "resonance/rational.hpp"

#include "resonance/errors.hpp"

#include <cmath>
#include <limits>

namespace resonance {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("cannot convert non-finite double to rational");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
  // 53 bits of mantissa as an integer.
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  return Rational(m) * pow2(exp - 53);
}

std::string to_string(const Rational& q) {
  auto num = boost::multiprecision::numerator(q);
  auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw InvalidArgument("empty rational literal");
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt p(text.substr(0, slash));
      BigInt q(text.substr(slash + 1));
      if (q == 0) throw InvalidArgument("zero denominator in '" + text + "'");
      return Rational(p, q);
    }
    bool integral = text.find_first_of(".eE") == std::string::npos;
    if (integral) return Rational(BigInt(text));
  } catch (const std::runtime_error&) {
    throw InvalidArgument("malformed rational '" + text + "'");
  }
  // Decimal literal: split mantissa and exponent, keep it exact.
  std::string mant = text;
  long exp10 = 0;
  auto e = text.find_first_of("eE");
  if (e != std::string::npos) {
    mant = text.substr(0, e);
    try {
      exp10 = std::stol(text.substr(e + 1));
    } catch (...) {
      throw InvalidArgument("malformed exponent in '" + text + "'");
    }
  }
  bool negative = !mant.empty() && mant[0] == '-';
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) mant = mant.substr(1);
  auto dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw InvalidArgument("malformed rational '" + text + "'");
  Rational value{BigInt(digits)};
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exp10)));
  value = exp10 >= 0 ? value * ten_pow : value / ten_pow;
  return negative ? -value : value;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational pow2(int e) {
  BigInt p = BigInt(1) << std::abs(e);
  return e >= 0 ? Rational(p) : Rational(BigInt(1), p);
}

}  // namespace resonance
