#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "invp/interval.hpp"

namespace invp {

struct CoverCandidate {
  Interval span;
  double weight = 1.0;  // > 0
};

struct CoverResult {
  std::vector<std::size_t> chosen;  // indices into the candidate list, ascending
  double total_weight = 0.0;
};

// Exact minimum-weight subfamily of closed candidate intervals whose union
// contains every target point. Dynamic program over candidates sorted by
// right endpoint, where the state is the covered frontier; O(n log n).
// Ties prefer fewer intervals, then the leftmost chain. Throws
// UncoverableError carrying the first uncovered gap.
CoverResult min_weight_cover(std::span<const Interval> target,
                             std::span<const CoverCandidate> candidates);

// First maximal run of target points outside the union of `cover`, or an
// empty interval when the target is covered.
Interval first_uncovered_gap(std::span<const Interval> target, std::span<const Interval> cover);

}  // namespace invp
