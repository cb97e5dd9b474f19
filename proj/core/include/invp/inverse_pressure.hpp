#pragma once

// Inverse topological pressure on skew-product models. Points are shadowed
// along prehistories (backward branches); the fixed-length cover quantity
//
//   Q_m(phi, eps) = inf { sum_{C in Γ} exp(S_m phi(C)) : Γ ⊂ C_m eps-covers Λ }
//
// is computed exactly per base cylinder as a 1-D minimum-weight interval
// cover of the stable slice, and its exponential growth rate in m estimates
// P^-(phi, eps).

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "invp/interval_cover.hpp"
#include "invp/pressure.hpp"
#include "invp/skew_model.hpp"

namespace invp {

// Fiber potential of the form coeff * phi_s + shift.
struct LinearPotential {
  double coeff = 0.0;
  double shift = 0.0;

  static LinearPotential stable(double t) { return {t, 0.0}; }
  static LinearPotential constant(double c) { return {0.0, c}; }
};

struct ShadowSet {
  Interval base_part;          // depth-k(eps) cylinder of the anchor
  std::size_t base_depth = 0;  // k(eps)
  Interval fiber_part;         // exact set of shadowed fiber coordinates
  double center = 0.0;         // anchor fiber coordinate y_0
  double radius = 0.0;         // eps * prod sup|g'_{a_i}|, exact for affine fibers
  double eps = 0.0;
};

// X(C, eps) restricted to backward branches inside Λ. Throws EpsilonTooLarge
// when eps >= eps0 (backward symbols are no longer forced).
ShadowSet shadow_set(const SkewSystem& sys, const Prehistory& c, double eps);

struct CoverOptions {
  std::size_t anchor_offset = 4;  // fiber anchors resolve the slice at depth m + offset
  std::size_t cap = kDefaultEnumerationCap;
  unsigned jobs = 1;
  // Restrict the cover target to base cylinders with these first symbols.
  std::optional<std::vector<Symbol>> first_symbols;
  bool breakdown = false;  // fill per-cylinder rows in QEstimate
};

// All prehistories of length m anchored at the representative (left endpoint)
// of base cylinder `cylinder`, one per distinct backward branch class and
// fiber anchor of the depth-(m + offset) slice sample inside its cylinder.
std::vector<Prehistory> enumerate_prehistories_of_cylinder(const SkewSystem& sys,
                                                           const Word& cylinder, std::size_t m,
                                                           const CoverOptions& opt = {});

struct CylinderCover {
  std::string cylinder;  // dotted word of the base cylinder
  std::size_t m = 0;
  std::size_t cover_size = 0;
  double log_weight = 0.0;
};

struct QEstimate {
  std::size_t m = 0;
  double eps = 0.0;
  double log_value = 0.0;
  double value = 0.0;
  std::size_t cylinders = 0;
  std::vector<CylinderCover> breakdown;
};

struct RateSample {
  std::size_t m = 0;
  double log_q = 0.0;
  double rate = 0.0;  // (1/m) log Q_m
};

struct InversePressureEstimate {
  double eps = 0.0;
  std::vector<RateSample> sequence;
  double limsup_proxy = 0.0;  // running max of the rates over the tail half
  double extrapolated = 0.0;  // slope of log Q_m against m over the tail half
  double aitken = 0.0;        // Aitken delta-squared on the last three rates
  double band = 0.0;          // |extrapolated - last raw rate|
};

// Caches the cover geometry per (branch class of the anchor symbol, m), so
// that sweeps over t and m rebuild nothing but the weights.
class InversePressureEngine {
 public:
  InversePressureEngine(const SkewSystem& sys, double eps, CoverOptions opt = {});

  const SkewSystem& system() const { return sys_; }
  double eps() const { return eps_; }
  std::size_t base_depth() const { return k_; }

  QEstimate q_m_minus(const LinearPotential& phi, std::size_t m);
  InversePressureEstimate estimate(const LinearPotential& phi,
                                   const std::vector<std::size_t>& m_range);
  // Variable-length cover value over lengths N..max_len with penalty e^{-lambda n}.
  double m_minus_finite(double lambda, const LinearPotential& phi, std::size_t N,
                        std::size_t max_len);

  struct Problem;

 private:
  const Problem& problem(Symbol s, std::size_t m);
  std::vector<std::pair<Symbol, double>> anchor_groups() const;

  const SkewSystem& sys_;
  double eps_;
  CoverOptions opt_;
  std::size_t k_;
  std::mutex mu_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::shared_ptr<const Problem>> cache_;
};

QEstimate Q_m_minus(const SkewSystem& sys, const LinearPotential& phi, std::size_t m, double eps,
                    const CoverOptions& opt = {});

InversePressureEstimate inverse_pressure_estimate(const SkewSystem& sys, const LinearPotential& phi,
                                                  double eps,
                                                  const std::vector<std::size_t>& m_range,
                                                  const CoverOptions& opt = {});

// Tiny-instance oracle (d <= 2, max_len <= 5, k(eps) <= 3): exact inf over
// covers mixing prehistory lengths N..max_len, by exhaustive branching on
// the interval that covers the leftmost uncovered point.
double M_minus_finite(const SkewSystem& sys, double lambda, const LinearPotential& phi,
                      std::size_t N, double eps, std::size_t max_len, const CoverOptions& opt = {});

// lambda at which M_minus_finite crosses 1 (it is decreasing in lambda).
double M_minus_threshold(const SkewSystem& sys, const LinearPotential& phi, std::size_t N,
                         double eps, std::size_t max_len, const CoverOptions& opt = {});

inline constexpr std::size_t kDefaultIterateAlphabetCap = 4096;

// f^n as a skew system: base alphabet = admissible n-words (slopes multiply),
// fiber for word u = g_{u_n} o ... o g_{u_1}.
SkewSystem iterate_system(const SkewSystem& sys, std::size_t n,
                          std::size_t alphabet_cap = kDefaultIterateAlphabetCap);

struct TsnResult {
  BowenRoot root;
  std::vector<std::pair<double, double>> evaluations;  // (t, estimated P^-)
};

// Zero of t -> estimated P^-_{f^n}(t phi_s^n, eps).
TsnResult t_s_n_eps(const SkewSystem& sys, std::size_t n, double eps,
                    const std::vector<std::size_t>& m_range, double tol = 1e-6,
                    const CoverOptions& opt = {});

// rho_n = eps * rho^n for 0 < rho < 1 / chi_u and eps < eps0.
double rho_schedule(double eps, double rho, std::size_t n, double chi_u, double eps0);

struct EpsSweep {
  std::vector<InversePressureEstimate> estimates;  // eps0/2, eps0/4, eps0/8
  bool monotone = true;  // nondecreasing as eps decreases
};
EpsSweep inverse_pressure_sweep(const SkewSystem& sys, const LinearPotential& phi,
                                const std::vector<std::size_t>& m_range,
                                const CoverOptions& opt = {}, double slack = 1e-9);

}  // namespace invp
