#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace resonance {

/// Monotone Φ: (0,∞) → (0,∞). The flags are declared by whoever builds the
/// function; nothing here tries to infer limit behaviour from samples.
class GrowthFunction {
 public:
  GrowthFunction() = default;
  GrowthFunction(std::string name, std::function<double(double)> fn, bool satisfies_delta2,
                 bool is_non_regular);

  /// t (1 + ln⁺ t)^{k-1}.
  static GrowthFunction llogl(int k);
  /// t^p, p > 0.
  static GrowthFunction power(double p);
  /// Piecewise-linear through sorted (t, Φ(t)) points, linear extrapolation
  /// with the last slope beyond the table.
  static GrowthFunction table(std::vector<std::pair<double, double>> points, bool satisfies_delta2,
                              bool is_non_regular);

  double operator()(double t) const { return fn_(t); }
  const std::string& name() const { return name_; }
  bool satisfies_delta2() const { return delta2_; }
  bool is_non_regular() const { return non_regular_; }

  /// True if Φ is nondecreasing on every consecutive pair of the samples.
  bool monotone_on(std::vector<double> samples) const;

 private:
  std::string name_;
  std::function<double(double)> fn_;
  bool delta2_ = false;
  bool non_regular_ = false;
};

}  // namespace resonance
