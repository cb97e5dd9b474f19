#pragma once

// Dimension-side checks: grid box counting, the Moran-equation oracle for
// separated affine slices, and assembled reports comparing the stable
// dimension with the pressure roots.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invp/interval.hpp"
#include "invp/inverse_pressure.hpp"
#include "invp/markov_base.hpp"
#include "invp/skew_model.hpp"

namespace invp {

// N0(eps) is a grid-cover count, an upper bound on the minimal cover size.
struct BoxCountReport {
  std::vector<double> scales;  // decreasing
  std::vector<std::uint64_t> counts;
  double dimension = 0.0;  // least-squares slope of log N against -log eps
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit in log N
  double band = 0.0;      // spread of the consecutive-scale slopes around the fit

  std::uint64_t count_at(double eps) const;
};

// Grid counts for a finite outer approximation whose pieces are no longer
// than `resolution`. Throws ScaleTooFine when a scale is below it and
// InvalidInput for fewer than 4 scales.
BoxCountReport box_counting(std::span<const Interval> set, std::span<const double> scales,
                            double resolution = 0.0);
BoxCountReport box_counting(std::span<const Box> set, std::span<const double> scales,
                            double resolution = 0.0);

// Geometric scales base^j for j = first..last.
std::vector<double> geometric_scales(double base, int first, int last);

// Unique t with spectral radius of A diag(ratio^t) equal to 1 (sum of
// ratio^t = 1 on the full shift). Bisection to 1e-12.
double moran_root(std::span<const double> ratios);
double moran_root(std::span<const double> ratios, const TransitionMatrix& a);

// Stable slice over active symbol s at depth q, with identical branch maps merged.
std::vector<Interval> reduced_slice(const SkewSystem& sys, Symbol s, std::size_t depth,
                                    std::size_t cap = kDefaultEnumerationCap);
// Planar boxes branch(s) x slice(s) covering Λ.
std::vector<Box> lambda_outer_approximation(const SkewSystem& sys, std::size_t depth,
                                            std::size_t cap = kDefaultEnumerationCap);

BoxCountReport slice_dimension(const SkewSystem& sys, Symbol s, std::size_t depth,
                               std::span<const double> scales);

struct Threshold {
  std::size_t n_min = 0;    // least n with N0 chi_s^{n eta} < 1
  std::size_t n_formula = 0;  // ceil(4 log(1/eps) / (eta log(1/chi_s)))
  bool consistent = true;   // n_formula >= n_min whenever N0 <= eps^-4
};
Threshold n_of_eps_eta(std::uint64_t n0, double chi_s, double eps, double eta);
Threshold n_of_eps_eta(const BoxCountReport& n0, double chi_s, double eps, double eta);

struct OscillationReport {
  double bound = 0.0;     // dimB log chi_u / log(1/chi_s)
  double observed = 0.0;  // max - min of slice dimensions over active symbols
  bool passed = false;
};
double oscillation_bound(const SkewSystem& sys, double dim_b);
OscillationReport oscillation_check(const SkewSystem& sys, double dim_b, std::size_t depth,
                                    std::span<const double> scales);

struct Verdict {
  std::string id;
  std::string anchor;  // the inequality under test
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  bool passed = false;
  bool required = true;
};

struct TsnRow {
  std::size_t n = 0;
  double eps = 0.0;
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct DimensionConfig {
  std::size_t slice_depth = 8;
  std::vector<double> scales;  // empty: chi_s^j for j = 2..slice_depth-1
  std::optional<double> eps;   // default eps0 / 4
  std::vector<std::size_t> m_range{4, 5, 6, 7, 8};
  std::vector<std::size_t> n_values{1};
  double eta = 0.5;
  double tol = 0.1;       // inequality verdicts
  double tol_eq = 1e-6;   // between exact roots
  double tol_box = 0.05;  // between a root and a box count
  bool compute_tsn = true;
  CoverOptions cover;
  ProfileOptions profile;
};

struct DimensionReport {
  std::string model_id;
  BoxCountReport delta_box;
  std::optional<double> delta_oracle;
  std::size_t d_prime = 0;
  std::size_t d_dprime = 0;
  bool profile_certified = false;
  double t_s0_dprime = 0.0;
  double t_s0_ddprime = 0.0;
  std::vector<TsnRow> tsn;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, double>> runtimes;  // seconds

  bool all_required_pass() const;
};

DimensionReport stable_dimension_report(const SkewSystem& sys, const DimensionConfig& cfg = {});

// Stable field order, one "key = value" per line.
std::string to_text(const DimensionReport& r);

}  // namespace invp
