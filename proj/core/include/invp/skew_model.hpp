#pragma once

// Desk-scale c-hyperbolic skew products f(x, y) = (E(x), g_{b(x)}(y)): E is an
// expanding Markov map of [0, 1] (unstable direction) and {g_a} are increasing
// contractions of [0, 1] (stable direction). Stable-direction conformality is
// automatic in one real dimension.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "invp/fiber_map.hpp"
#include "invp/markov_base.hpp"

namespace invp {

class SkewSystem {
 public:
  SkewSystem(MarkovMap base, std::vector<FiberMap> fibers, std::optional<double> eps0 = {},
             std::string id = {});

  const std::string& id() const { return id_; }
  const MarkovMap& base() const { return base_; }
  const TransitionMatrix& transitions() const { return base_.transitions(); }
  std::size_t alphabet_size() const { return fibers_.size(); }
  const FiberMap& fiber(Symbol a) const { return fibers_[a]; }
  const std::vector<FiberMap>& fibers() const { return fibers_; }

  double lambda_s() const { return lambda_s_; }  // inf |g'| over all branches
  double chi_s() const { return chi_s_; }        // sup |g'| over all branches
  double chi_u() const { return base_.info().chi_u; }
  // Shadowing scale below which backward symbols are forced by closeness.
  double eps0() const { return eps0_; }
  bool affine() const { return affine_; }

 private:
  MarkovMap base_;
  std::vector<FiberMap> fibers_;
  double lambda_s_ = 0.0;
  double chi_s_ = 0.0;
  double eps0_ = 0.0;
  bool affine_ = true;
  std::string id_;
};

// Throws CountMismatch, ContractionViolated, ImageEscapes, plus any base error.
SkewSystem build_system(BranchSpec base, std::vector<FiberMap> fibers,
                        std::optional<double> eps0 = {}, std::string id = {});

// Λ-point certified to finite depth: fiber lies in the fiber cylinder of the
// witnessing backward word, i.e. within chi_s^q of the true slice.
struct LambdaPoint {
  Word itinerary;  // forward prefix; itinerary[0] is the active branch
  double base = 0.0;
  double fiber = 0.0;
  Word witness;

  std::size_t depth() const { return witness.size(); }
};

bool is_certified(const SkewSystem& sys, const LambdaPoint& p, double tol = 1e-12);
LambdaPoint sample_lambda_point(const SkewSystem& sys, std::mt19937_64& rng,
                                std::size_t itinerary_depth, std::size_t witness_depth);

// log |g_a'| for affine fibers (depth-1 locally constant).
double phi_s(const SkewSystem& sys, Symbol a);
double phi_s(const SkewSystem& sys, Symbol a, double fiber);
double phi_s(const SkewSystem& sys, const LambdaPoint& p);
// Table a -> log ratio_a; throws Unsupported for non-affine fibers.
std::vector<double> stable_potential(const SkewSystem& sys);

// g_{a_1} o ... o g_{a_m}([0, 1]) for a backward word (a_1 most recent).
Interval fiber_cylinder(const SkewSystem& sys, std::span<const Symbol> backward_word);

// A backward branch class: all words producing the same composed fiber map
// and leaving the same set of admissible predecessors.
struct BranchState {
  Word word;  // lexicographically first representative
  FiberMap map;
  Symbol last = 0;  // oldest symbol (the anchor symbol when the word is empty)
};

// Distinct backward branch classes of length m admissible from symbol s.
std::vector<BranchState> backward_states(const SkewSystem& sys, Symbol s, std::size_t m,
                                         std::size_t cap = kDefaultEnumerationCap);

// Depth-m outer approximation of the stable slice over points whose active
// symbol is s: sorted distinct fiber cylinders.
std::vector<Interval> stable_slice_sample(const SkewSystem& sys, Symbol s, std::size_t m,
                                          std::size_t cap = kDefaultEnumerationCap);
std::vector<Interval> stable_slice_sample(const SkewSystem& sys, const LambdaPoint& x, std::size_t m,
                                          std::size_t cap = kDefaultEnumerationCap);

struct OverlapPartition {
  std::vector<std::vector<Symbol>> classes;
  bool certified = false;  // false: smooth fibers, singleton fallback
};
OverlapPartition overlap_classes(const SkewSystem& sys, double tol = 1e-12);

struct PreimageProfile {
  std::vector<std::vector<Symbol>> classes;
  std::size_t d_prime = 0;
  std::size_t d_dprime = 0;
  bool certified = false;
  double resolution = 0.0;  // chi_s^q of the empirical sample (0 when certified)
};

struct ProfileOptions {
  std::size_t samples = 200;
  std::size_t depth = 12;
  std::uint64_t seed = 1;
};
PreimageProfile preimage_profile(const SkewSystem& sys, const ProfileOptions& opt = {});

// Single-step preimages of p inside Λ, each certified to depth p.depth() - 1.
// Throws DepthExhausted when p carries no certification.
std::vector<LambdaPoint> preimages_of_point(const SkewSystem& sys, const LambdaPoint& p);

// Prehistory C = (z, z_{-1}, ..., z_{-m}) in the product model.
struct Prehistory {
  BasePrehistory base;
  std::vector<double> fiber_orbit;  // y_0, ..., y_{-m}

  std::size_t length() const { return base.length(); }
  Symbol anchor_symbol() const { return base.anchor_itinerary.front(); }
  std::vector<PhasePoint> points(const MarkovMap& map) const;
};

// Builds the backward orbit; throws Inadmissible if the chain leaves [0, 1].
Prehistory make_prehistory(const SkewSystem& sys, Word itinerary, double base_anchor,
                           double fiber_anchor, Word backward_word);

// Fiber points w whose backward orbit along C's word stays within eps of C's
// fiber orbit at every step: intersection over i of G_i(B(y_{-i}, eps)).
Interval shadowed_fiber_interval(const SkewSystem& sys, const Prehistory& c, double eps);

// |Df_s^m(y_{-m})| / |Df_s^m(x_{-m})|. Throws NotShadowed unless every term
// of `shadowed` lies within eps of the corresponding term of `c`.
double distortion_ratio(const SkewSystem& sys, const Prehistory& c, const Prehistory& shadowed,
                        double eps);

struct DistortionSample {
  double c1 = 1.0;  // max(max ratio, 1 / min ratio)
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  std::size_t pairs = 0;
};
// Random shadowed pairs of lengths 0..max_len.
DistortionSample measure_distortion(const SkewSystem& sys, double eps, std::size_t max_len,
                                    std::size_t pairs, std::uint64_t seed);

// max |phi_s(p) - phi_s(q)| / max(|dx|, |dy|) over the given pairs.
double lipschitz_diagnostic(const SkewSystem& sys,
                            std::span<const std::pair<LambdaPoint, LambdaPoint>> pairs);
std::vector<std::pair<LambdaPoint, LambdaPoint>> sample_lambda_pairs(const SkewSystem& sys,
                                                                     std::size_t n,
                                                                     std::uint64_t seed,
                                                                     bool same_branch = false);

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace invp
