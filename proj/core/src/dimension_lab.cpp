#include "invp/dimension_lab.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "invp/error.hpp"
#include "invp/pressure.hpp"

namespace invp {

namespace {

constexpr double kGridTol = 1e-9;

// Grid cells [i s, (i + 1) s) met by [lo, hi]; endpoints within kGridTol of a
// grid line do not reach into the neighbouring cell.
std::pair<std::int64_t, std::int64_t> cell_range(double lo, double hi, double s) {
  const auto i0 = static_cast<std::int64_t>(std::floor(lo / s + kGridTol));
  auto i1 = static_cast<std::int64_t>(std::ceil(hi / s - kGridTol)) - 1;
  return {i0, std::max(i0, i1)};
}

void check_scales(std::span<const double> scales, double resolution) {
  if (scales.size() < 4) throw Error(ErrorCode::kInvalidInput, "box counting needs >= 4 scales");
  for (double s : scales) {
    if (!(s > 0.0)) throw Error(ErrorCode::kInvalidInput, "scales must be positive");
    if (s < resolution) {
      throw Error(ErrorCode::kScaleTooFine, "scale " + std::to_string(s) +
                                                " is below the set resolution " +
                                                std::to_string(resolution));
    }
  }
}

BoxCountReport fit(std::span<const double> scales, std::vector<std::uint64_t> counts) {
  BoxCountReport r;
  r.scales.assign(scales.begin(), scales.end());
  r.counts = std::move(counts);
  const std::size_t n = r.scales.size();
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -std::log(r.scales[i]);
    y[i] = std::log(static_cast<double>(r.counts[i]));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  r.dimension = sxy / sxx;
  r.intercept = my - r.dimension * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (r.intercept + r.dimension * x[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / static_cast<double>(n));
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] == x[i - 1]) continue;
    const double local = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    r.band = std::max(r.band, std::abs(local - r.dimension));
  }
  return r;
}

}  // namespace

std::uint64_t BoxCountReport::count_at(double eps) const {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (std::abs(scales[i] - eps) <= 1e-12 * eps) return counts[i];
  }
  throw Error(ErrorCode::kInvalidInput, "scale " + std::to_string(eps) + " is not in the table");
}

BoxCountReport box_counting(std::span<const Interval> set, std::span<const double> scales,
                            double resolution) {
  check_scales(scales, resolution);
  const auto merged = merge_intervals(set);
  std::vector<std::uint64_t> counts;
  for (double s : scales) {
    std::uint64_t n = 0;
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    for (const auto& iv : merged) {
      auto [i0, i1] = cell_range(iv.lo, iv.hi, s);
      i0 = std::max(i0, last + 1);
      if (i1 >= i0) n += static_cast<std::uint64_t>(i1 - i0 + 1);
      last = std::max(last, i1);
    }
    counts.push_back(n);
  }
  return fit(scales, std::move(counts));
}

BoxCountReport box_counting(std::span<const Box> set, std::span<const double> scales,
                            double resolution) {
  check_scales(scales, resolution);
  std::vector<std::uint64_t> counts;
  for (double s : scales) {
    std::unordered_set<std::uint64_t> cells;
    for (const auto& b : set) {
      const auto [x0, x1] = cell_range(b.x.lo, b.x.hi, s);
      const auto [y0, y1] = cell_range(b.y.lo, b.y.hi, s);
      for (auto i = x0; i <= x1; ++i) {
        for (auto j = y0; j <= y1; ++j) {
          cells.insert((static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint32_t>(j));
        }
      }
    }
    counts.push_back(cells.size());
  }
  return fit(scales, std::move(counts));
}

std::vector<double> geometric_scales(double base, int first, int last) {
  std::vector<double> out;
  for (int j = first; j <= last; ++j) out.push_back(std::pow(base, j));
  return out;
}

namespace {

double bisect_decreasing(const std::function<double(double)>& f) {
  double lo = 0.0;
  if (f(lo) <= 0.0) return lo;
  double hi = 1.0;
  while (f(hi) > 0.0) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_ratios(std::span<const double> ratios) {
  if (ratios.empty()) throw Error(ErrorCode::kInvalidInput, "no ratios");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::kInvalidInput, "ratios must lie in (0, 1)");
  }
}

}  // namespace

double moran_root(std::span<const double> ratios) {
  check_ratios(ratios);
  return bisect_decreasing([&](double t) {
    double s = 0.0;
    for (double r : ratios) s += std::pow(r, t);
    return s - 1.0;
  });
}

double moran_root(std::span<const double> ratios, const TransitionMatrix& a) {
  check_ratios(ratios);
  const auto d = static_cast<Eigen::Index>(a.size());
  if (ratios.size() != a.size()) throw Error(ErrorCode::kInvalidInput, "ratio count mismatch");
  return bisect_decreasing([&](double t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (a(static_cast<Symbol>(i), static_cast<Symbol>(j))) {
          m(i, j) = std::pow(ratios[static_cast<std::size_t>(j)], t);
        }
      }
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return std::log(es.eigenvalues().cwiseAbs().maxCoeff());
  });
}

std::vector<Interval> reduced_slice(const SkewSystem& sys, Symbol s, std::size_t depth,
                                    std::size_t cap) {
  return stable_slice_sample(sys, s, depth, cap);
}

std::vector<Box> lambda_outer_approximation(const SkewSystem& sys, std::size_t depth,
                                            std::size_t cap) {
  std::vector<Box> out;
  for (Symbol s = 0; s < sys.alphabet_size(); ++s) {
    for (const auto& iv : reduced_slice(sys, s, depth, cap)) out.push_back({sys.base().branch(s), iv});
  }
  return out;
}

BoxCountReport slice_dimension(const SkewSystem& sys, Symbol s, std::size_t depth,
                               std::span<const double> scales) {
  const auto slice = reduced_slice(sys, s, depth);
  return box_counting(slice, scales, std::pow(sys.chi_s(), static_cast<double>(depth)));
}

Threshold n_of_eps_eta(std::uint64_t n0, double chi_s, double eps, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::kInvalidInput, "eta must be positive");
  if (!(chi_s > 0.0 && chi_s < 1.0)) throw Error(ErrorCode::kInvalidInput, "chi_s must lie in (0, 1)");
  if (n0 == 0) throw Error(ErrorCode::kInvalidInput, "N0 must be positive");
  Threshold out;
  const double log_n0 = std::log(static_cast<double>(n0));
  const double step = eta * std::log(chi_s);
  // Strict inequality: a product equal to 1 up to rounding does not qualify.
  const double margin = 1e-12 * std::max(1.0, log_n0);
  std::size_t n = 1;
  while (log_n0 + static_cast<double>(n) * step >= -margin) ++n;
  out.n_min = n;
  const double x = 4.0 * std::log(1.0 / eps) / (eta * std::log(1.0 / chi_s));
  out.n_formula = static_cast<std::size_t>(std::max(1.0, std::ceil(x - 1e-9)));
  if (log_n0 <= 4.0 * std::log(1.0 / eps) * (1.0 + 1e-12)) out.consistent = out.n_formula >= out.n_min;
  return out;
}

Threshold n_of_eps_eta(const BoxCountReport& n0, double chi_s, double eps, double eta) {
  return n_of_eps_eta(n0.count_at(eps), chi_s, eps, eta);
}

double oscillation_bound(const SkewSystem& sys, double dim_b) {
  return dim_b * std::log(sys.chi_u()) / std::log(1.0 / sys.chi_s());
}

OscillationReport oscillation_check(const SkewSystem& sys, double dim_b, std::size_t depth,
                                    std::span<const double> scales) {
  OscillationReport out;
  out.bound = oscillation_bound(sys, dim_b);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Symbol s = 0; s < sys.alphabet_size(); ++s) {
    const double d = slice_dimension(sys, s, depth, scales).dimension;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  out.observed = hi - lo;
  out.passed = out.observed <= out.bound;
  return out;
}

bool DimensionReport::all_required_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.passed || !v.required; });
}

namespace {

std::optional<double> slice_oracle(const SkewSystem& sys) {
  if (!sys.affine()) return std::nullopt;
  std::vector<double> ratios;
  std::vector<FiberMap> seen;
  for (const auto& g : sys.fibers()) {
    if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
    seen.push_back(g);
    ratios.push_back(g.ratio());
  }
  if (sys.transitions().is_full()) return moran_root(ratios);
  if (seen.size() == sys.alphabet_size()) return moran_root(ratios, sys.transitions());
  return std::nullopt;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

DimensionReport stable_dimension_report(const SkewSystem& sys, const DimensionConfig& cfg) {
  DimensionReport r;
  r.model_id = sys.id();
  Stopwatch clock;

  auto scales = cfg.scales;
  if (scales.empty()) {
    scales = geometric_scales(sys.chi_s(), 2, static_cast<int>(cfg.slice_depth) - 1);
  }
  r.delta_box = slice_dimension(sys, 0, cfg.slice_depth, scales);
  r.delta_oracle = slice_oracle(sys);
  r.runtimes.emplace_back("box_counting", clock.lap());

  const auto profile = preimage_profile(sys, cfg.profile);
  r.d_prime = profile.d_prime;
  r.d_dprime = profile.d_dprime;
  r.profile_certified = profile.certified;
  r.t_s0_dprime = t_s0(sys, static_cast<double>(r.d_prime), 1e-10).t_star;
  r.t_s0_ddprime = t_s0(sys, static_cast<double>(r.d_dprime), 1e-10).t_star;
  r.runtimes.emplace_back("t_s0", clock.lap());

  const double delta = r.delta_box.dimension;
  const double eps = cfg.eps.value_or(sys.eps0() / 4.0);
  if (cfg.compute_tsn) {
    for (auto n : cfg.n_values) {
      const auto res = t_s_n_eps(sys, n, eps, cfg.m_range, 1e-6, cfg.cover);
      r.tsn.push_back({n, eps, res.root.t_star, res.root.lo, res.root.hi});
      r.verdicts.push_back({"upper-bound-n" + std::to_string(n), "delta_s <= t_s_n(eps)", delta,
                            res.root.t_star, cfg.tol, delta <= res.root.t_star + cfg.tol, true});
      r.verdicts.push_back({"lower-bound-n" + std::to_string(n),
                            "t_s_n(eps) <= delta_s + eta for n >= n(eps, eta)", res.root.t_star,
                            delta + cfg.eta, cfg.tol, res.root.t_star <= delta + cfg.eta, false});
    }
    r.runtimes.emplace_back("t_s_n_eps", clock.lap());
  }

  const bool open_case = r.d_prime == r.d_dprime;
  if (open_case) {
    const bool required = r.profile_certified;
    if (r.delta_oracle) {
      const double gap = std::abs(r.t_s0_dprime - *r.delta_oracle);
      r.verdicts.push_back({"open-oracle", "t_s0(d') = Moran root of the slice", r.t_s0_dprime,
                            *r.delta_oracle, cfg.tol_eq, gap <= cfg.tol_eq, required});
    }
    r.verdicts.push_back({"open-box", "delta_s = t_s0(d')", delta, r.t_s0_dprime, cfg.tol_box,
                          std::abs(delta - r.t_s0_dprime) <= cfg.tol_box, required});
  }
  r.verdicts.push_back({"bracket-lower", "t_s0(d'') <= delta_s", r.t_s0_ddprime, delta, cfg.tol_box,
                        r.t_s0_ddprime <= delta + cfg.tol_box, true});
  r.verdicts.push_back({"bracket-upper", "delta_s <= t_s0(d')", delta, r.t_s0_dprime, cfg.tol_box,
                        delta <= r.t_s0_dprime + cfg.tol_box, true});
  return r;
}

std::string to_text(const DimensionReport& r) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  out << "model = " << r.model_id << "\n";
  out << "delta_box = " << num(r.delta_box.dimension) << "\n";
  out << "delta_box_residual = " << num(r.delta_box.residual) << "\n";
  out << "delta_oracle = " << (r.delta_oracle ? num(*r.delta_oracle) : "none") << "\n";
  out << "d_prime = " << r.d_prime << "\n";
  out << "d_dprime = " << r.d_dprime << "\n";
  out << "profile_certified = " << (r.profile_certified ? "true" : "false") << "\n";
  out << "t_s0_dprime = " << num(r.t_s0_dprime) << "\n";
  out << "t_s0_ddprime = " << num(r.t_s0_ddprime) << "\n";
  for (const auto& row : r.tsn) {
    out << "t_s_n[" << row.n << "] = " << num(row.root) << " (eps " << num(row.eps) << ")\n";
  }
  for (const auto& v : r.verdicts) {
    out << "verdict " << v.id << " = " << (v.passed ? "pass" : "FAIL")
        << (v.required ? "" : " (informational)") << " | " << v.anchor << " | lhs " << num(v.lhs)
        << " rhs " << num(v.rhs) << " tol " << num(v.tol) << "\n";
  }
  return out.str();
}

}  // namespace invp
