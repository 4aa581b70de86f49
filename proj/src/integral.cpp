#include "resonance/errors.hpp"
#include "resonance/integral_image.hpp"

namespace resonance {

FunctionIntegral::FunctionIntegral(const StepFunction& f)
    : mode_(f.mode()),
      cell_volume_(f.grid().cell_volume()),
      cell_volume_d_(to_double(cell_volume_)) {
  if (mode_ == ValueMode::Rational)
    exact_ = IntegralImage<Rational>(f.grid(), f.rationals());
  else
    approx_ = IntegralImage<double>(f.grid(), f.doubles());
}

Rational FunctionIntegral::integral(const AxisRect& r) const {
  if (mode_ == ValueMode::Rational) return exact_.sum(r) * cell_volume_;
  return rational_from_double(approx_.sum(r)) * cell_volume_;
}

double FunctionIntegral::integral_double(const AxisRect& r) const {
  if (mode_ == ValueMode::Rational) return to_double(exact_.sum(r) * cell_volume_);
  return approx_.sum(r) * cell_volume_d_;
}

CommonDenominator common_denominator(const StepFunction& f) {
  if (f.mode() != ValueMode::Rational) throw InvalidArgument("common denominator needs rational mode");
  BigInt den = 1;
  for (const auto& v : f.rationals()) {
    BigInt d = boost::multiprecision::denominator(v);
    if (d != 1) den = boost::multiprecision::lcm(den, d);
  }
  CommonDenominator out;
  out.denominator = den;
  out.numerators.resize(f.size());
  BigInt total = 0;
  const BigInt limit = BigInt(1) << 62;
  for (std::size_t i = 0; i < f.size(); ++i) {
    BigInt num = boost::multiprecision::numerator(f.rationals()[i]) * (den / boost::multiprecision::denominator(f.rationals()[i]));
    total += num;
    if (total >= limit)
      throw InfeasibleError("rational values too large for exact integer kernels; use double mode");
    out.numerators[i] = num.convert_to<std::int64_t>();
  }
  return out;
}

}  // namespace resonance
