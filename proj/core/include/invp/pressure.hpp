#pragma once

// Classical (forward) topological pressure for locally constant potentials:
// exact values from the weighted transition matrix, (n, eps)-spanning
// estimates, and monotone Bowen-root bisection.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "invp/markov_base.hpp"
#include "invp/skew_model.hpp"

namespace invp {

inline constexpr std::size_t kDefaultRecodeDepthCap = 6;

// Locally constant potential of depth p: a value for every admissible p-word,
// addressed in base-d positional order (first symbol most significant).
class Potential {
 public:
  static Potential depth1(std::vector<double> values, std::string tag = {});
  // `table` has d^p entries; entries of inadmissible words are ignored.
  static Potential from_table(std::size_t d, std::size_t depth, std::vector<double> table,
                              std::string tag = {});

  std::size_t depth() const { return depth_; }
  std::size_t alphabet_size() const { return d_; }
  const std::string& tag() const { return tag_; }
  double operator()(std::span<const Symbol> word) const;
  double at(std::size_t index) const { return table_[index]; }
  const std::vector<double>& table() const { return table_; }

  Potential scaled(double t, double shift) const;  // t * phi + shift

 private:
  std::size_t d_ = 0;
  std::size_t depth_ = 1;
  std::vector<double> table_;
  std::string tag_;
};

struct PressureValue {
  enum class Method { kExactSpectral, kSpanningEstimate };
  double value = 0.0;
  Method method = Method::kExactSpectral;
  std::size_t iterations = 0;
  double residual = 0.0;
  // Spanning-estimate diagnostics.
  std::size_t n = 0;
  double eps = 0.0;
  std::size_t k = 0;
  double raw = 0.0;
  double bias = 0.0;  // k(eps) * h_top / n, subtracted from raw
};

// P(t * phi - c) = log rho(M) - c with M[a][b] = A[a][b] exp(t phi(b)).
// Throws NotRecoded for depth > 1 and Reducible for reducible A.
PressureValue pressure_exact(const TransitionMatrix& a, const Potential& phi, double t, double c);

struct Recoded {
  TransitionMatrix transitions;
  Potential potential;
  std::vector<Word> alphabet;  // recoded symbol -> original p-word
};
// Higher-block presentation on admissible p-words.
Recoded recode_depth1(const TransitionMatrix& a, const Potential& phi,
                      std::size_t depth_cap = kDefaultRecodeDepthCap);

// k(eps) = ceil(log(1/eps) / log(min slope)): cylinders this deep have
// base length <= eps.
std::size_t cylinder_depth_for(double eps, double min_slope);

// (1/n) log sum over (n + k(eps))-cylinder representatives z of
// exp(S_n(t phi - c)(z)). Reports the raw value and value = raw - k h_top / n.
PressureValue pressure_spanning(const TransitionMatrix& a, const Potential& phi, double t,
                                double c, std::size_t n, double eps, double min_slope,
                                std::size_t cap = kDefaultEnumerationCap);
PressureValue pressure_spanning(const SkewSystem& sys, const Potential& phi, double t, double c,
                                std::size_t n, double eps,
                                std::size_t cap = kDefaultEnumerationCap);

struct BowenRoot {
  double t_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double tol = 0.0;
  std::size_t evaluations = 0;
};

// Bisection root of a nonincreasing F with F(lo) >= 0 >= F(hi). Checks
// monotonicity on a 16-point grid first (slack 1e-9). An endpoint where F is
// exactly zero is returned as the root. Throws NoSignChange / NotMonotone.
BowenRoot bowen_root(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-6);

// Zero of t -> P(t phi_s - log d') on [0, h_top / |log chi_s| + 1].
BowenRoot t_s0(const SkewSystem& sys, double dprime, double tol = 1e-6);

}  // namespace invp
