#pragma once

#include <stdexcept>
#include <string>

namespace resonance {

/// Invalid parameters or mismatched inputs (bad grid pairing, h <= 1, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A construction cannot be carried out within the configured limits.
/// `achievable_depth` is set by stage-wise constructions; `required_resolution`
/// by constructions that need a finer grid.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what, int achievable_depth = -1,
                           int required_resolution = -1)
      : std::runtime_error(what),
        achievable_depth_(achievable_depth),
        required_resolution_(required_resolution) {}

  int achievable_depth() const { return achievable_depth_; }
  int required_resolution() const { return required_resolution_; }

 private:
  int achievable_depth_;
  int required_resolution_;
};

/// An exact re-check of a constructed object failed. Always a bug.
class VerificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical procedure (quadrature, bisection) did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace resonance
