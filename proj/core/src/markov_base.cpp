#include "invp/markov_base.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "invp/error.hpp"
#include "invp/perron.hpp"

namespace invp {

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<int>>& rows) : d_(rows.size()) {
  if (d_ == 0) throw Error(ErrorCode::kInvalidInput, "empty transition matrix");
  cells_.assign(d_ * d_, 0);
  for (std::size_t a = 0; a < d_; ++a) {
    if (rows[a].size() != d_) {
      throw Error(ErrorCode::kInvalidInput, "transition matrix is not square");
    }
    for (std::size_t b = 0; b < d_; ++b) {
      if (rows[a][b] != 0 && rows[a][b] != 1) {
        throw Error(ErrorCode::kInvalidInput, "transition entries must be 0 or 1");
      }
      cells_[a * d_ + b] = static_cast<std::uint8_t>(rows[a][b]);
    }
  }
  for (Symbol a = 0; a < d_; ++a) {
    if (row_sum(a) == 0) {
      throw Error(ErrorCode::kInvalidInput, "row " + std::to_string(a) + " has no successor");
    }
    if (column_sum(a) == 0) {
      throw Error(ErrorCode::kInvalidInput, "column " + std::to_string(a) + " has no predecessor");
    }
  }
  index_columns();
}

TransitionMatrix TransitionMatrix::full(std::size_t d) {
  return TransitionMatrix(std::vector<std::vector<int>>(d, std::vector<int>(d, 1)));
}

void TransitionMatrix::index_columns() {
  std::map<std::vector<std::uint8_t>, std::size_t> seen;
  column_class_.assign(d_, 0);
  for (std::size_t b = 0; b < d_; ++b) {
    std::vector<std::uint8_t> col(d_);
    for (std::size_t a = 0; a < d_; ++a) col[a] = cells_[a * d_ + b];
    auto [it, inserted] = seen.emplace(std::move(col), seen.size());
    column_class_[b] = it->second;
  }
}

bool TransitionMatrix::is_full() const {
  return std::all_of(cells_.begin(), cells_.end(), [](auto c) { return c != 0; });
}

bool TransitionMatrix::is_irreducible() const {
  auto reach_all = [&](bool transpose) {
    std::vector<bool> seen(d_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < d_; ++b) {
        const bool edge = transpose ? cells_[b * d_ + a] : cells_[a * d_ + b];
        if (edge && !seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return d_ > 0 && reach_all(false) && reach_all(true);
}

std::size_t TransitionMatrix::row_sum(Symbol a) const {
  std::size_t s = 0;
  for (std::size_t b = 0; b < d_; ++b) s += cells_[a * d_ + b];
  return s;
}

std::size_t TransitionMatrix::column_sum(Symbol b) const {
  std::size_t s = 0;
  for (std::size_t a = 0; a < d_; ++a) s += cells_[a * d_ + b];
  return s;
}

std::vector<double> TransitionMatrix::as_weights() const {
  return {cells_.begin(), cells_.end()};
}

bool TransitionMatrix::admissible_forward(std::span<const Symbol> w) const {
  for (auto s : w) {
    if (s >= d_) return false;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!(*this)(w[i], w[i + 1])) return false;
  }
  return true;
}

bool TransitionMatrix::admissible_backward(std::span<const Symbol> w) const {
  for (auto s : w) {
    if (s >= d_) return false;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!(*this)(w[i + 1], w[i])) return false;
  }
  return true;
}

MarkovMap::MarkovMap(BranchSpec spec) : spec_(std::move(spec)) {
  const auto& A = spec_.admissibility;
  const std::size_t d = A.size();
  if (d == 0 || spec_.intervals.size() != d || spec_.slopes.size() != d) {
    throw Error(ErrorCode::kInvalidInput, "branch count does not match alphabet size");
  }
  for (Symbol a = 0; a < d; ++a) {
    const auto& iv = spec_.intervals[a];
    if (!(iv.lo < iv.hi) || iv.lo < -kMarkovTolerance || iv.hi > 1.0 + kMarkovTolerance) {
      throw Error(ErrorCode::kInvalidInput, "branch interval " + std::to_string(a) + " malformed");
    }
    const double s = spec_.slopes[a];
    if (!std::isfinite(s) || s <= 1.0) {
      throw Error(ErrorCode::kNotExpanding,
                  "branch " + std::to_string(a) + " has slope " + std::to_string(s) + " <= 1");
    }
  }
  std::vector<Symbol> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Symbol x, Symbol y) { return spec_.intervals[x].lo < spec_.intervals[y].lo; });
  for (std::size_t i = 1; i < d; ++i) {
    if (spec_.intervals[order[i]].lo < spec_.intervals[order[i - 1]].hi - kMarkovTolerance) {
      throw Error(ErrorCode::kInvalidInput, "branch intervals overlap");
    }
  }

  images_.resize(d);
  for (Symbol a = 0; a < d; ++a) {
    std::vector<Interval> succ;
    for (Symbol b = 0; b < d; ++b) {
      if (A(a, b)) succ.push_back(spec_.intervals[b]);
    }
    std::sort(succ.begin(), succ.end());
    for (std::size_t i = 1; i < succ.size(); ++i) {
      if (std::abs(succ[i].lo - succ[i - 1].hi) > kMarkovTolerance) {
        throw Error(ErrorCode::kNonMarkov,
                    "successors of branch " + std::to_string(a) + " do not form an interval");
      }
    }
    images_[a] = {succ.front().lo, succ.back().hi};
    const double mapped = spec_.slopes[a] * spec_.intervals[a].length();
    if (std::abs(mapped - images_[a].length()) > kMarkovTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "branch " << a << " image length " << mapped << " differs from successor hull "
          << images_[a].length();
      throw Error(ErrorCode::kNonMarkov, msg.str());
    }
  }

  if (!A.is_irreducible()) {
    throw Error(ErrorCode::kReducible, "transition graph is not strongly connected");
  }
  info_.d = d;
  info_.irreducible = true;
  info_.chi_u = *std::max_element(spec_.slopes.begin(), spec_.slopes.end());
  info_.min_slope = *std::min_element(spec_.slopes.begin(), spec_.slopes.end());
  info_.h_top = std::log(perron_root(A.as_weights(), d).value);
}

double MarkovMap::forward(Symbol a, double x) const {
  return images_[a].lo + spec_.slopes[a] * (x - spec_.intervals[a].lo);
}

double MarkovMap::inverse(Symbol a, double x) const {
  return spec_.intervals[a].lo + (x - images_[a].lo) / spec_.slopes[a];
}

SystemInfo validate_system(const BranchSpec& spec) { return MarkovMap(spec).info(); }

PreimageBounds base_preimage_bounds(const TransitionMatrix& a) {
  PreimageBounds out{std::numeric_limits<std::size_t>::max(), 0};
  for (Symbol b = 0; b < a.size(); ++b) {
    out.dmin = std::min(out.dmin, a.column_sum(b));
    out.dmax = std::max(out.dmax, a.column_sum(b));
  }
  return out;
}

namespace {

std::uint64_t sat_add(std::uint64_t x, std::uint64_t y) {
  const auto r = x + y;
  return r < x ? std::numeric_limits<std::uint64_t>::max() : r;
}

}  // namespace

std::uint64_t count_backward_words(const TransitionMatrix& a, Symbol s, std::size_t m) {
  const std::size_t d = a.size();
  // v[x] = number of backward words of the current length ending (oldest) at x.
  std::vector<std::uint64_t> v(d, 0);
  v[s] = 1;
  for (std::size_t step = 0; step < m; ++step) {
    std::vector<std::uint64_t> next(d, 0);
    for (Symbol x = 0; x < d; ++x) {
      if (v[x] == 0) continue;
      for (Symbol p = 0; p < d; ++p) {
        if (a(p, x)) next[p] = sat_add(next[p], v[x]);
      }
    }
    v = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto c : v) total = sat_add(total, c);
  return total;
}

std::uint64_t count_forward_words(const TransitionMatrix& a, Symbol s, std::size_t k) {
  if (k == 0) return 1;
  const std::size_t d = a.size();
  std::vector<std::uint64_t> v(d, 0);
  v[s] = 1;
  for (std::size_t step = 1; step < k; ++step) {
    std::vector<std::uint64_t> next(d, 0);
    for (Symbol x = 0; x < d; ++x) {
      if (v[x] == 0) continue;
      for (Symbol y = 0; y < d; ++y) {
        if (a(x, y)) next[y] = sat_add(next[y], v[x]);
      }
    }
    v = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto c : v) total = sat_add(total, c);
  return total;
}

std::vector<Word> enumerate_backward_words(const TransitionMatrix& a, Symbol s, std::size_t m,
                                           std::size_t cap) {
  if (s >= a.size()) throw Error(ErrorCode::kInvalidInput, "symbol out of range");
  const auto count = count_backward_words(a, s, m);
  if (count > cap) {
    throw Error(ErrorCode::kResourceLimit, std::to_string(count) + " backward words of length " +
                                               std::to_string(m) + " exceed cap " +
                                               std::to_string(cap));
  }
  std::vector<Word> out;
  out.reserve(count);
  Word w;
  w.reserve(m);
  const std::size_t d = a.size();
  // Depth-first in increasing symbol order yields lexicographic output.
  auto rec = [&](auto&& self, Symbol last) -> void {
    if (w.size() == m) {
      out.push_back(w);
      return;
    }
    for (Symbol p = 0; p < d; ++p) {
      if (!a(p, last)) continue;
      w.push_back(p);
      self(self, p);
      w.pop_back();
    }
  };
  rec(rec, s);
  return out;
}

double min_plus_backward(const TransitionMatrix& a, std::span<const double> phi, Symbol s,
                         std::size_t m) {
  const std::size_t d = a.size();
  if (phi.size() != d) throw Error(ErrorCode::kInvalidInput, "potential size mismatch");
  if (m == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[x]: minimal sum over backward chains of the current length whose
  // oldest symbol is x.
  std::vector<double> best(d, kInf);
  for (Symbol p = 0; p < d; ++p) {
    if (a(p, s)) best[p] = phi[p];
  }
  for (std::size_t step = 1; step < m; ++step) {
    std::vector<double> next(d, kInf);
    for (Symbol p = 0; p < d; ++p) {
      double m_in = kInf;
      for (Symbol x = 0; x < d; ++x) {
        if (a(p, x)) m_in = std::min(m_in, best[x]);
      }
      if (m_in < kInf) next[p] = phi[p] + m_in;
    }
    best = std::move(next);
  }
  return *std::min_element(best.begin(), best.end());
}

Interval cylinder_interval(const MarkovMap& map, std::span<const Symbol> w) {
  if (w.empty()) throw Error(ErrorCode::kInvalidInput, "cylinder of the empty word");
  if (!map.transitions().admissible_forward(w)) {
    throw Error(ErrorCode::kInadmissible, "word " + word_to_string(w) + " is not admissible");
  }
  Interval iv = map.branch(w.back());
  for (std::size_t i = w.size() - 1; i-- > 0;) {
    iv = {map.inverse(w[i], iv.lo), map.inverse(w[i], iv.hi)};
  }
  return iv;
}

std::vector<double> BasePrehistory::points(const MarkovMap& map) const {
  if (!anchor_itinerary.empty() && !backward_word.empty() &&
      !map.transitions()(backward_word.front(), anchor_itinerary.front())) {
    throw Error(ErrorCode::kInadmissible, "first backward symbol cannot precede the anchor");
  }
  if (!map.transitions().admissible_backward(backward_word)) {
    throw Error(ErrorCode::kInadmissible, "backward word is not a chain");
  }
  std::vector<double> xs{anchor};
  xs.reserve(backward_word.size() + 1);
  for (auto a : backward_word) xs.push_back(map.inverse(a, xs.back()));
  return xs;
}

DKDistance dK_distance(std::span<const PhasePoint> p, std::span<const PhasePoint> q, double K,
                       std::size_t depth, double diameter) {
  if (!(K > 1.0)) throw Error(ErrorCode::kInvalidInput, "d_K requires K > 1");
  if (p.size() < depth || q.size() < depth) {
    throw Error(ErrorCode::kInvalidInput, "prehistories shorter than the truncation depth");
  }
  DKDistance out;
  double scale = 1.0;
  for (std::size_t i = 0; i < depth; ++i) {
    const double term =
        std::max(std::abs(p[i].base - q[i].base), std::abs(p[i].fiber - q[i].fiber));
    out.value += term * scale;
    scale /= K;
  }
  const bool identical = p.size() == q.size() &&
                         std::equal(p.begin(), p.end(), q.begin(), [](auto& x, auto& y) {
                           return x.base == y.base && x.fiber == y.fiber;
                         });
  out.tail_bound = identical ? 0.0 : diameter * scale / (1.0 - 1.0 / K);
  return out;
}

std::string word_to_string(std::span<const Symbol> w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s.empty() ? "()" : s;
}

}  // namespace invp
