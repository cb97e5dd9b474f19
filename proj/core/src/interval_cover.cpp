#include "invp/interval_cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "invp/error.hpp"

namespace invp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic DP value: total weight, then interval count, then position.
struct Cost {
  double weight = kInf;
  std::size_t count = 0;
  std::size_t pos = std::numeric_limits<std::size_t>::max();

  bool operator<(const Cost& o) const {
    return std::tie(weight, count, pos) < std::tie(o.weight, o.count, o.pos);
  }
};

class MinTree {
 public:
  explicit MinTree(std::size_t n) : size_(1) {
    while (size_ < n) size_ <<= 1;
    tree_.assign(2 * size_, Cost{});
  }
  void set(std::size_t i, Cost c) {
    i += size_;
    tree_[i] = c;
    for (i >>= 1; i >= 1; i >>= 1) tree_[i] = std::min(tree_[2 * i], tree_[2 * i + 1]);
  }
  // Minimum over [lo, hi).
  Cost query(std::size_t lo, std::size_t hi) const {
    Cost best;
    for (lo += size_, hi += size_; lo < hi; lo >>= 1, hi >>= 1) {
      if (lo & 1) best = std::min(best, tree_[lo++]);
      if (hi & 1) best = std::min(best, tree_[--hi]);
    }
    return best;
  }

 private:
  std::size_t size_;
  std::vector<Cost> tree_;
};

}  // namespace

Interval first_uncovered_gap(std::span<const Interval> target, std::span<const Interval> cover) {
  const auto comps = merge_intervals(target);
  const auto u = merge_intervals(cover);
  std::size_t k = 0;
  for (const auto& c : comps) {
    while (k < u.size() && u[k].hi < c.lo) ++k;
    double cur = c.lo;
    if (k < u.size() && u[k].lo <= cur) {
      // Merged pieces are separated, so the points right after u[k].hi are
      // uncovered unless the component ends there.
      cur = u[k].hi;
      if (cur >= c.hi) continue;
      ++k;
    }
    const double end = k < u.size() ? std::min(c.hi, u[k].lo) : c.hi;
    return {cur, end};
  }
  return {1.0, 0.0};
}

CoverResult min_weight_cover(std::span<const Interval> target,
                             std::span<const CoverCandidate> candidates) {
  const auto comps = merge_intervals(target);
  CoverResult out;
  if (comps.empty()) return out;

  for (const auto& c : candidates) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw Error(ErrorCode::kInvalidInput, "cover weights must be positive and finite");
    }
  }
  {
    std::vector<Interval> spans;
    for (const auto& c : candidates) {
      if (!c.span.empty()) spans.push_back(c.span);
    }
    const auto gap = first_uncovered_gap(comps, spans);
    if (!gap.empty()) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "target points in (" << gap.lo << ", " << gap.hi << ") are not covered";
      throw UncoverableError(gap, msg.str());
    }
  }

  // Candidates sorted by right endpoint; position in this order is the DP index.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].span.empty()) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = candidates[x].span;
    const auto& b = candidates[y].span;
    return std::tie(a.hi, a.lo, x) < std::tie(b.hi, b.lo, y);
  });
  const std::size_t n = order.size();
  std::vector<double> right(n);
  for (std::size_t p = 0; p < n; ++p) right[p] = candidates[order[p]].span.hi;

  // A frontier c (target covered on (-inf, c]) may be extended by candidate
  // [a, b] iff no target point lies in (c, a), i.e. c >= sup(T ∩ (-inf, a)).
  auto requirement = [&](double a) {
    auto it = std::lower_bound(comps.begin(), comps.end(), a,
                               [](const Interval& c, double x) { return c.lo < x; });
    if (it == comps.begin()) return -kInf;
    --it;
    return std::min(a, it->hi);
  };

  const double t_max = comps.back().hi;
  MinTree tree(n);
  std::vector<Cost> dp(n);
  std::vector<std::size_t> parent(n, n);
  Cost best;
  std::size_t best_pos = n;
  for (std::size_t p = 0; p < n; ++p) {
    const auto& cand = candidates[order[p]];
    const double need = requirement(cand.span.lo);
    Cost from;
    std::size_t from_pos = n;
    if (need == -kInf) {
      from = Cost{0.0, 0, n};
    }
    // Predecessors: right endpoint in [need, b) strictly before p.
    const auto lo_pos = static_cast<std::size_t>(
        std::lower_bound(right.begin(), right.begin() + p, need) - right.begin());
    const auto hi_pos = static_cast<std::size_t>(
        std::lower_bound(right.begin(), right.begin() + p, cand.span.hi) - right.begin());
    if (lo_pos < hi_pos) {
      const Cost q = tree.query(lo_pos, hi_pos);
      if (q.weight < kInf && (from.weight == kInf || q < from)) {
        from = q;
        from_pos = q.pos;
      }
    }
    if (from.weight == kInf) continue;
    dp[p] = Cost{from.weight + cand.weight, from.count + 1, p};
    parent[p] = from_pos;
    tree.set(p, dp[p]);
    if (cand.span.hi >= t_max && dp[p] < best) {
      best = dp[p];
      best_pos = p;
    }
  }
  if (best_pos == n) {
    throw UncoverableError({t_max, t_max}, "no covering chain reaches the end of the target");
  }
  for (std::size_t p = best_pos; p != n; p = parent[p]) out.chosen.push_back(order[p]);
  std::sort(out.chosen.begin(), out.chosen.end());
  out.total_weight = best.weight;
  return out;
}

}  // namespace invp
