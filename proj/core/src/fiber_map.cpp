#include "invp/fiber_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invp/error.hpp"

namespace invp {

namespace {

constexpr double kImageTolerance = 1e-12;

double eval(const QuadraticStage& s, double y) { return s.c0 + y * (s.c1 + y * s.c2); }
double slope(const QuadraticStage& s, double y) { return s.c1 + 2.0 * s.c2 * y; }

double invert(const QuadraticStage& s, double v) {
  const double r = v - s.c0;
  if (s.c2 == 0.0) return r / s.c1;
  // Root of c2 y^2 + c1 y - r = 0 on the increasing branch, written to avoid
  // cancellation when c2 is small.
  const double disc = std::max(0.0, s.c1 * s.c1 + 4.0 * s.c2 * r);
  return 2.0 * r / (s.c1 + std::sqrt(disc));
}

double stage_inf(const QuadraticStage& s) { return std::min(slope(s, 0.0), slope(s, 1.0)); }
double stage_sup(const QuadraticStage& s) { return std::max(slope(s, 0.0), slope(s, 1.0)); }

}  // namespace

FiberMap FiberMap::affine(double ratio, double offset) {
  FiberMap g;
  g.stages_.push_back({offset, ratio, 0.0});
  return g;
}

FiberMap FiberMap::quadratic(double c0, double c1, double c2) {
  FiberMap g;
  g.stages_.push_back({c0, c1, c2});
  return g;
}

FiberMap FiberMap::compose(const FiberMap& outer, const FiberMap& inner) {
  if (outer.is_affine() && inner.is_affine()) {
    return affine(outer.ratio() * inner.ratio(), outer.ratio() * inner.offset() + outer.offset());
  }
  FiberMap g = inner;
  g.stages_.insert(g.stages_.end(), outer.stages_.begin(), outer.stages_.end());
  return g;
}

bool FiberMap::is_affine() const { return stages_.size() == 1 && stages_[0].c2 == 0.0; }

double FiberMap::ratio() const { return stages_.front().c1; }
double FiberMap::offset() const { return stages_.front().c0; }

double FiberMap::operator()(double y) const {
  for (const auto& s : stages_) y = eval(s, y);
  return y;
}

double FiberMap::derivative(double y) const {
  double d = 1.0;
  for (const auto& s : stages_) {
    d *= slope(s, y);
    y = eval(s, y);
  }
  return d;
}

double FiberMap::inverse(double v) const {
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) v = invert(*it, v);
  return v;
}

Interval FiberMap::image_of(const Interval& iv) const { return {(*this)(iv.lo), (*this)(iv.hi)}; }

double FiberMap::inf_derivative() const {
  double d = 1.0;
  for (const auto& s : stages_) d *= stage_inf(s);
  return d;
}

double FiberMap::sup_derivative() const {
  double d = 1.0;
  for (const auto& s : stages_) d *= stage_sup(s);
  return d;
}

void FiberMap::validate() const {
  for (const auto& s : stages_) {
    if (!std::isfinite(s.c0) || !std::isfinite(s.c1) || !std::isfinite(s.c2)) {
      throw Error(ErrorCode::kInvalidInput, "non-finite fiber coefficient in " + describe());
    }
  }
  if (!(inf_derivative() > 0.0)) {
    throw Error(ErrorCode::kContractionViolated,
                "fiber map " + describe() + " is not increasing with |g'| > 0");
  }
  if (!(sup_derivative() < 1.0)) {
    throw Error(ErrorCode::kContractionViolated, "fiber map " + describe() + " has sup|g'| >= 1");
  }
  // Each stage is increasing on [0, 1], so the image is [g(0), g(1)].
  double lo = 0.0;
  double hi = 1.0;
  for (const auto& s : stages_) {
    lo = eval(s, lo);
    hi = eval(s, hi);
    if (lo < -kImageTolerance || hi > 1.0 + kImageTolerance) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "fiber map " << describe() << " sends [0,1] to [" << lo << "," << hi << "]";
      throw Error(ErrorCode::kImageEscapes, msg.str());
    }
  }
}

std::string FiberMap::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (is_affine()) {
    os << "affine(ratio=" << ratio() << ", offset=" << offset() << ")";
    return os.str();
  }
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (i) os << " then ";
    os << "quadratic(" << stages_[i].c0 << ", " << stages_[i].c1 << ", " << stages_[i].c2 << ")";
  }
  return os.str();
}

}  // namespace invp
