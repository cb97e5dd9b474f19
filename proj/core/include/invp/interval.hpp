#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace invp {

// Closed interval [lo, hi] on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool empty() const { return hi < lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other, double tol = 0.0) const {
    return lo - tol <= other.lo && other.hi <= hi + tol;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

inline Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// Sorts and merges overlapping or touching intervals.
inline std::vector<Interval> merge_intervals(std::span<const Interval> in) {
  std::vector<Interval> sorted(in.begin(), in.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Interval> out;
  for (const auto& iv : sorted) {
    if (iv.empty()) continue;
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

// Axis-aligned box [x.lo, x.hi] x [y.lo, y.hi]; x is the base coordinate.
struct Box {
  Interval x;
  Interval y;
};

}  // namespace invp
