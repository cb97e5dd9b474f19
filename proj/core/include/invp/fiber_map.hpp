#pragma once

#include <string>
#include <vector>

#include "invp/interval.hpp"

namespace invp {

// y -> c0 + c1*y + c2*y^2 on [0, 1], increasing there.
struct QuadraticStage {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const QuadraticStage&, const QuadraticStage&) = default;
};

// Contracting increasing map of [0, 1] into itself, stored as a composition of
// quadratic stages (stages_[0] is applied first). Affine maps collapse to a
// single stage with c2 == 0; the quadratic kind is the named smooth builtin.
class FiberMap {
 public:
  static FiberMap affine(double ratio, double offset);
  static FiberMap quadratic(double c0, double c1, double c2);
  // outer o inner
  static FiberMap compose(const FiberMap& outer, const FiberMap& inner);

  bool is_affine() const;
  // Only meaningful when is_affine().
  double ratio() const;
  double offset() const;

  double operator()(double y) const;
  double derivative(double y) const;
  // Preimage of v in [0, 1]; v must lie in image().
  double inverse(double v) const;
  Interval image() const { return image_of({0.0, 1.0}); }
  Interval image_of(const Interval& iv) const;

  // Certified bounds on |g'| over [0, 1].
  double inf_derivative() const;
  double sup_derivative() const;

  // Throws ContractionViolated or ImageEscapes.
  void validate() const;

  const std::vector<QuadraticStage>& stages() const { return stages_; }
  std::string describe() const;

  friend bool operator==(const FiberMap&, const FiberMap&) = default;

 private:
  std::vector<QuadraticStage> stages_;
};

}  // namespace invp
