#pragma once

// Symbolic and geometric model of the expanding base dynamics: a subshift of
// finite type realized as a piecewise-affine Markov map of [0, 1].

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "invp/interval.hpp"

namespace invp {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;
inline constexpr double kMarkovTolerance = 1e-12;

// entries(a, b) is true iff symbol b may follow symbol a in forward time.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  // Requires a square pattern in which every row and every column has a one.
  explicit TransitionMatrix(const std::vector<std::vector<int>>& rows);

  static TransitionMatrix full(std::size_t d);

  std::size_t size() const { return d_; }
  bool operator()(Symbol a, Symbol b) const { return cells_[a * d_ + b] != 0; }

  bool is_full() const;
  bool is_irreducible() const;
  std::size_t row_sum(Symbol a) const;
  std::size_t column_sum(Symbol b) const;

  // Symbols with identical predecessor sets share a class id. Backward
  // enumeration from two symbols of one class produces the same words.
  const std::vector<std::size_t>& column_class() const { return column_class_; }

  // 0/1 pattern as a row-major double matrix.
  std::vector<double> as_weights() const;

  // True iff w is admissible in forward time (each pair allowed).
  bool admissible_forward(std::span<const Symbol> w) const;
  // True iff (a_1, ..., a_m) is a backward chain: a_{i+1} may precede a_i.
  bool admissible_backward(std::span<const Symbol> w) const;

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  void index_columns();

  std::size_t d_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<std::size_t> column_class_;
};

struct BranchSpec {
  std::vector<Interval> intervals;  // one per symbol, interiors pairwise disjoint
  std::vector<double> slopes;       // |Df_u| on each branch
  TransitionMatrix admissibility;
};

struct SystemInfo {
  std::size_t d = 0;
  double h_top = 0.0;     // log spectral radius of the 0/1 matrix
  double chi_u = 0.0;     // max slope
  double min_slope = 0.0;
  bool irreducible = false;
};

// Validated piecewise-affine Markov map. Each branch a maps intervals[a]
// increasingly and affinely onto the hull of its successors' intervals.
class MarkovMap {
 public:
  explicit MarkovMap(BranchSpec spec);

  const BranchSpec& spec() const { return spec_; }
  const TransitionMatrix& transitions() const { return spec_.admissibility; }
  std::size_t alphabet_size() const { return spec_.slopes.size(); }
  const Interval& branch(Symbol a) const { return spec_.intervals[a]; }
  const Interval& image(Symbol a) const { return images_[a]; }
  double slope(Symbol a) const { return spec_.slopes[a]; }
  const SystemInfo& info() const { return info_; }

  double forward(Symbol a, double x) const;
  double inverse(Symbol a, double x) const;

 private:
  BranchSpec spec_;
  std::vector<Interval> images_;
  SystemInfo info_;
};

// Throws NonMarkov, NotExpanding or Reducible.
SystemInfo validate_system(const BranchSpec& spec);

struct PreimageBounds {
  std::size_t dmin = 0;
  std::size_t dmax = 0;
};
PreimageBounds base_preimage_bounds(const TransitionMatrix& a);

// Number of admissible backward words of length m ending at s, i.e. the
// s-column sum of A^m. Saturates at UINT64_MAX.
std::uint64_t count_backward_words(const TransitionMatrix& a, Symbol s, std::size_t m);

// All backward words (a_1, ..., a_m) with A[a_1][s] and A[a_{i+1}][a_i],
// in lexicographic order. Throws ResourceLimit past `cap`.
std::vector<Word> enumerate_backward_words(const TransitionMatrix& a, Symbol s, std::size_t m,
                                           std::size_t cap = kDefaultEnumerationCap);

// min over backward words of sum_{i=1..m} phi(a_i); O(m d^2).
double min_plus_backward(const TransitionMatrix& a, std::span<const double> phi, Symbol s,
                         std::size_t m);

// Base points whose first |w| branch symbols are w.
Interval cylinder_interval(const MarkovMap& map, std::span<const Symbol> w);

// Number of admissible forward words of length k starting with s.
std::uint64_t count_forward_words(const TransitionMatrix& a, Symbol s, std::size_t k);

// Point of a prehistory in the product model.
struct PhasePoint {
  double base = 0.0;
  double fiber = 0.0;
};

// A base point together with a backward symbol chain. The anchor carries an
// explicit forward itinerary prefix so that boundary points stay unambiguous.
struct BasePrehistory {
  Word anchor_itinerary;
  double anchor = 0.0;
  Word backward_word;

  std::size_t length() const { return backward_word.size(); }
  // x_0, x_{-1}, ..., x_{-m}.
  std::vector<double> points(const MarkovMap& map) const;
};

struct DKDistance {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the discarded terms i >= depth
};

// Truncated natural-extension metric: sum_{i<depth} d(p_i, q_i) / K^i with
// the max-coordinate distance on points. `diameter` bounds each term.
DKDistance dK_distance(std::span<const PhasePoint> p, std::span<const PhasePoint> q, double K,
                       std::size_t depth, double diameter = 1.0);

std::string word_to_string(std::span<const Symbol> w);

}  // namespace invp
