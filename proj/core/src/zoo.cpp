#include "invp/zoo.hpp"

#include <cmath>

#include "invp/error.hpp"

namespace invp::zoo {

namespace {

BranchSpec uniform_full(std::size_t d) {
  BranchSpec spec;
  for (std::size_t i = 0; i < d; ++i) {
    spec.intervals.push_back({static_cast<double>(i) / static_cast<double>(d),
                              static_cast<double>(i + 1) / static_cast<double>(d)});
    spec.slopes.push_back(static_cast<double>(d));
  }
  spec.admissibility = TransitionMatrix::full(d);
  return spec;
}

}  // namespace

SkewSystem m1() {
  const auto lo = FiberMap::affine(1.0 / 3.0, 0.0);
  const auto hi = FiberMap::affine(1.0 / 3.0, 2.0 / 3.0);
  return build_system(uniform_full(4), {lo, lo, hi, hi}, std::nullopt, "M1");
}

SkewSystem m2() {
  const auto lo = FiberMap::affine(0.25, 0.0);
  const auto hi = FiberMap::affine(0.25, 0.75);
  return build_system(uniform_full(3), {lo, lo, hi}, std::nullopt, "M2");
}

SkewSystem s2() {
  return build_system(uniform_full(2), {FiberMap::affine(0.25, 0.0), FiberMap::affine(0.25, 0.75)},
                      std::nullopt, "S2");
}

SkewSystem golden_mean() {
  const double a = (std::sqrt(5.0) - 1.0) / 2.0;
  BranchSpec spec;
  spec.intervals = {{0.0, a}, {a, 1.0}};
  spec.slopes = {1.0 / a, 1.0 / a};
  spec.admissibility = TransitionMatrix({{1, 1}, {1, 0}});
  return build_system(std::move(spec),
                      {FiberMap::affine(1.0 / 3.0, 0.0), FiberMap::affine(1.0 / 3.0, 2.0 / 3.0)},
                      std::nullopt, "golden");
}

SkewSystem degenerate() {
  const auto g = FiberMap::affine(0.25, 0.0);
  return build_system(uniform_full(2), {g, g}, std::nullopt, "degenerate");
}

SkewSystem smooth_m1(double sigma) {
  const double c1 = 1.0 / 3.0 + sigma;
  const auto lo = FiberMap::quadratic(0.0, c1, -sigma);
  const auto hi = FiberMap::quadratic(2.0 / 3.0, c1, -sigma);
  return build_system(uniform_full(4), {lo, lo, hi, hi}, std::nullopt, "M1-smooth");
}

std::vector<std::string> names() { return {"M1", "M2", "S2", "golden", "degenerate", "M1-smooth"}; }

SkewSystem by_name(const std::string& name) {
  if (name == "M1") return m1();
  if (name == "M2") return m2();
  if (name == "S2") return s2();
  if (name == "golden") return golden_mean();
  if (name == "degenerate") return degenerate();
  if (name == "M1-smooth") return smooth_m1();
  throw Error(ErrorCode::kInvalidInput, "unknown model '" + name + "'");
}

}  // namespace invp::zoo
