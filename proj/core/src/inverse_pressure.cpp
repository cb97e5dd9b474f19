#include "invp/inverse_pressure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "invp/error.hpp"
#include "invp/numeric.hpp"

namespace invp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kContainTol = 1e-12;
// Slice pieces and shadow intervals reach the same cylinder endpoints through
// differently ordered compositions; pad spans so rounding leaves no gaps.
constexpr double kSpanPad = 1e-12;

Interval padded(Interval iv) { return {iv.lo - kSpanPad, iv.hi + kSpanPad}; }

Word first_forward_word(const TransitionMatrix& a, Symbol s, std::size_t k) {
  Word w{s};
  while (w.size() < k) {
    Symbol next = 0;
    while (!a(w.back(), next)) ++next;
    w.push_back(next);
  }
  return w;
}

void for_each_forward_word(const TransitionMatrix& a, Symbol s, std::size_t k,
                           const std::function<void(const Word&)>& fn) {
  Word w{s};
  auto rec = [&](auto&& self) -> void {
    if (w.size() == k) {
      fn(w);
      return;
    }
    for (Symbol b = 0; b < a.size(); ++b) {
      if (!a(w.back(), b)) continue;
      w.push_back(b);
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
}

double stable_sum(const SkewSystem& sys, const Prehistory& c) {
  double s = phi_s(sys, c.anchor_symbol(), c.fiber_orbit[0]);
  for (std::size_t i = 1; i <= c.length(); ++i) {
    s += phi_s(sys, c.base.backward_word[i - 1], c.fiber_orbit[i]);
  }
  return s;
}

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::size_t canonical_fiber(const SkewSystem& sys, Symbol s) {
  for (Symbol a = 0; a < s; ++a) {
    if (sys.fiber(a) == sys.fiber(s)) return a;
  }
  return s;
}

}  // namespace

ShadowSet shadow_set(const SkewSystem& sys, const Prehistory& c, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidInput, "eps must be positive");
  if (eps >= sys.eps0()) {
    throw Error(ErrorCode::kEpsilonTooLarge, "eps = " + std::to_string(eps) +
                                                 " is not below eps0 = " + std::to_string(sys.eps0()));
  }
  ShadowSet out;
  out.eps = eps;
  out.base_depth = cylinder_depth_for(eps, sys.base().info().min_slope);
  const auto& itin = c.base.anchor_itinerary;
  if (itin.size() < std::max<std::size_t>(out.base_depth, 1)) {
    throw Error(ErrorCode::kInvalidInput, "anchor itinerary shorter than k(eps) = " +
                                              std::to_string(out.base_depth));
  }
  out.base_part = cylinder_interval(
      sys.base(), std::span<const Symbol>(itin.data(), std::max<std::size_t>(out.base_depth, 1)));
  out.fiber_part = shadowed_fiber_interval(sys, c, eps);
  out.center = c.fiber_orbit[0];
  double r = eps;
  for (auto a : c.base.backward_word) r *= sys.fiber(a).sup_derivative();
  out.radius = r;
  return out;
}

std::vector<Prehistory> enumerate_prehistories_of_cylinder(const SkewSystem& sys,
                                                           const Word& cylinder, std::size_t m,
                                                           const CoverOptions& opt) {
  if (cylinder.empty()) throw Error(ErrorCode::kInvalidInput, "empty base cylinder");
  const Symbol s0 = cylinder.front();
  const double x = cylinder_interval(sys.base(), cylinder).lo;
  const auto classes = backward_states(sys, s0, m, opt.cap);
  const auto deep = stable_slice_sample(sys, s0, m + opt.anchor_offset, opt.cap);
  std::vector<Prehistory> out;
  for (const auto& st : classes) {
    const auto im = st.map.image();
    auto it = std::lower_bound(deep.begin(), deep.end(), im.lo - kContainTol,
                               [](const Interval& iv, double v) { return iv.lo < v; });
    for (; it != deep.end() && it->lo <= im.hi + kContainTol; ++it) {
      if (it->hi > im.hi + kContainTol) continue;
      out.push_back(make_prehistory(sys, cylinder, x, it->center(), st.word));
      if (out.size() > opt.cap) {
        throw Error(ErrorCode::kResourceLimit,
                    "more than " + std::to_string(opt.cap) + " prehistories for cylinder " +
                        word_to_string(cylinder));
      }
    }
  }
  return out;
}

struct InversePressureEngine::Problem {
  std::vector<Interval> target;
  std::vector<Interval> spans;
  std::vector<double> stable_sums;  // S_m phi_s over the m + 1 fiber points
  std::vector<std::size_t> lengths;
};

InversePressureEngine::InversePressureEngine(const SkewSystem& sys, double eps, CoverOptions opt)
    : sys_(sys), eps_(eps), opt_(std::move(opt)) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidInput, "eps must be positive");
  if (eps >= sys.eps0()) {
    throw Error(ErrorCode::kEpsilonTooLarge, "eps = " + std::to_string(eps) +
                                                 " is not below eps0 = " + std::to_string(sys.eps0()));
  }
  k_ = std::max<std::size_t>(cylinder_depth_for(eps, sys.base().info().min_slope), 1);
  if (opt_.first_symbols) {
    for (auto s : *opt_.first_symbols) {
      if (s >= sys.alphabet_size()) throw Error(ErrorCode::kInvalidInput, "first symbol out of range");
    }
  }
}

const InversePressureEngine::Problem& InversePressureEngine::problem(Symbol s, std::size_t m) {
  const auto key = std::make_tuple(sys_.transitions().column_class()[s], canonical_fiber(sys_, s), m);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
  }
  auto p = std::make_shared<Problem>();
  p->target = stable_slice_sample(sys_, s, m + opt_.anchor_offset, opt_.cap);
  const auto cyl = first_forward_word(sys_.transitions(), s, k_);
  for (const auto& c : enumerate_prehistories_of_cylinder(sys_, cyl, m, opt_)) {
    p->spans.push_back(padded(shadowed_fiber_interval(sys_, c, eps_)));
    p->stable_sums.push_back(stable_sum(sys_, c));
    p->lengths.push_back(m);
  }
  std::lock_guard lock(mu_);
  auto [it, inserted] = cache_.emplace(key, std::move(p));
  return *it->second;
}

std::vector<std::pair<Symbol, double>> InversePressureEngine::anchor_groups() const {
  std::vector<Symbol> symbols;
  if (opt_.first_symbols) {
    symbols = *opt_.first_symbols;
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  } else {
    symbols.resize(sys_.alphabet_size());
    std::iota(symbols.begin(), symbols.end(), Symbol{0});
  }
  std::vector<std::pair<Symbol, double>> out;
  for (auto s : symbols) {
    const auto n = count_forward_words(sys_.transitions(), s, k_);
    out.emplace_back(s, std::log(static_cast<double>(n)));
  }
  return out;
}

namespace {

struct SolvedCover {
  double log_weight = 0.0;  // excludes the (m + 1) * shift term
  std::size_t size = 0;
};

SolvedCover solve_cover(const InversePressureEngine::Problem& p, double coeff) {
  double top = -kInf;
  for (double s : p.stable_sums) top = std::max(top, coeff * s);
  std::vector<CoverCandidate> cands(p.spans.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    cands[i] = {p.spans[i], std::exp(coeff * p.stable_sums[i] - top)};
  }
  const auto res = min_weight_cover(p.target, cands);
  // Re-sum the chosen weights compensated so the value is order independent.
  CompensatedSum total;
  for (auto i : res.chosen) total.add(cands[i].weight);
  return {std::log(total.value()) + top, res.chosen.size()};
}

}  // namespace

QEstimate InversePressureEngine::q_m_minus(const LinearPotential& phi, std::size_t m) {
  const auto groups = anchor_groups();
  const auto solved = parallel_map<SolvedCover>(groups.size(), opt_.jobs, [&](std::size_t i) {
    return solve_cover(problem(groups[i].first, m), phi.coeff);
  });
  QEstimate out;
  out.m = m;
  out.eps = eps_;
  const double shift = static_cast<double>(m + 1) * phi.shift;
  std::vector<double> terms;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    terms.push_back(groups[i].second + solved[i].log_weight);
    out.cylinders += static_cast<std::size_t>(std::llround(std::exp(groups[i].second)));
    if (opt_.breakdown) {
      for_each_forward_word(sys_.transitions(), groups[i].first, k_, [&](const Word& w) {
        out.breakdown.push_back({word_to_string(w), m, solved[i].size, solved[i].log_weight + shift});
      });
    }
  }
  out.log_value = log_sum_exp(terms) + shift;
  out.value = std::exp(out.log_value);
  return out;
}

InversePressureEstimate InversePressureEngine::estimate(const LinearPotential& phi,
                                                        const std::vector<std::size_t>& m_range) {
  if (m_range.empty()) throw Error(ErrorCode::kInvalidInput, "m_range is empty");
  InversePressureEstimate out;
  out.eps = eps_;
  for (auto m : m_range) {
    if (m == 0) throw Error(ErrorCode::kInvalidInput, "m_range entries must be >= 1");
    const auto q = q_m_minus(phi, m);
    out.sequence.push_back({m, q.log_value, q.log_value / static_cast<double>(m)});
  }
  const std::size_t n = out.sequence.size();
  const std::size_t tail = n < 2 ? n : std::max<std::size_t>(2, (n + 1) / 2);
  std::vector<double> xs;
  std::vector<double> ys;
  out.limsup_proxy = -kInf;
  for (std::size_t i = n - tail; i < n; ++i) {
    xs.push_back(static_cast<double>(out.sequence[i].m));
    ys.push_back(out.sequence[i].log_q);
    out.limsup_proxy = std::max(out.limsup_proxy, out.sequence[i].rate);
  }
  const double last = out.sequence.back().rate;
  out.extrapolated = tail >= 2 ? ls_slope(xs, ys) : last;
  out.aitken = last;
  if (n >= 3) {
    const double r1 = out.sequence[n - 3].rate;
    const double r2 = out.sequence[n - 2].rate;
    const double den = (last - r2) - (r2 - r1);
    if (std::abs(den) > 1e-15) out.aitken = last - (last - r2) * (last - r2) / den;
  }
  out.band = std::abs(out.extrapolated - last);
  return out;
}

double InversePressureEngine::m_minus_finite(double lambda, const LinearPotential& phi,
                                             std::size_t N, std::size_t max_len) {
  if (sys_.alphabet_size() > 2 || max_len > 5 || k_ > 3) {
    throw Error(ErrorCode::kResourceLimit,
                "M_minus_finite is limited to d <= 2, max_len <= 5, k(eps) <= 3");
  }
  if (N > max_len) throw Error(ErrorCode::kInvalidInput, "N exceeds max_len");
  CompensatedSum total;
  for (const auto& [s, log_count] : anchor_groups()) {
    const auto target =
        merge_intervals(stable_slice_sample(sys_, s, max_len + opt_.anchor_offset, opt_.cap));
    const auto cyl = first_forward_word(sys_.transitions(), s, k_);
    std::vector<Interval> spans;
    std::vector<double> weights;
    CoverOptions local = opt_;
    for (std::size_t n = N; n <= max_len; ++n) {
      local.anchor_offset = max_len + opt_.anchor_offset - n;
      for (const auto& c : enumerate_prehistories_of_cylinder(sys_, cyl, n, local)) {
        spans.push_back(padded(shadowed_fiber_interval(sys_, c, eps_)));
        weights.push_back(std::exp(-lambda * static_cast<double>(n) + phi.coeff * stable_sum(sys_, c) +
                                   static_cast<double>(n + 1) * phi.shift));
      }
    }
    // Branch on every candidate containing the leftmost uncovered point; the
    // covered set is always (-inf, f], so memoize on f.
    std::map<double, double> memo;
    const double t_max = target.back().hi;
    auto best = [&](auto&& self, double f) -> double {
      if (f >= t_max) return 0.0;
      if (auto it = memo.find(f); it != memo.end()) return it->second;
      const auto comp = std::find_if(target.begin(), target.end(),
                                     [&](const Interval& c) { return c.hi > f; });
      const bool inside = comp->lo <= f;
      const double point = inside ? f : comp->lo;
      double value = kInf;
      for (std::size_t i = 0; i < spans.size(); ++i) {
        const auto& sp = spans[i];
        const bool hits = inside ? (sp.lo <= point && sp.hi > point)
                                 : (sp.lo <= point && sp.hi >= point);
        if (!hits || sp.empty()) continue;
        value = std::min(value, weights[i] + self(self, sp.hi));
      }
      memo[f] = value;
      return value;
    };
    const double v = best(best, -kInf);
    if (!std::isfinite(v)) {
      throw UncoverableError({t_max, t_max}, "mixed-length candidates do not cover the slice");
    }
    total.add(std::exp(log_count) * v);
  }
  return total.value();
}

QEstimate Q_m_minus(const SkewSystem& sys, const LinearPotential& phi, std::size_t m, double eps,
                    const CoverOptions& opt) {
  InversePressureEngine engine(sys, eps, opt);
  return engine.q_m_minus(phi, m);
}

InversePressureEstimate inverse_pressure_estimate(const SkewSystem& sys, const LinearPotential& phi,
                                                  double eps,
                                                  const std::vector<std::size_t>& m_range,
                                                  const CoverOptions& opt) {
  InversePressureEngine engine(sys, eps, opt);
  return engine.estimate(phi, m_range);
}

double M_minus_finite(const SkewSystem& sys, double lambda, const LinearPotential& phi,
                      std::size_t N, double eps, std::size_t max_len, const CoverOptions& opt) {
  InversePressureEngine engine(sys, eps, opt);
  return engine.m_minus_finite(lambda, phi, N, max_len);
}

double M_minus_threshold(const SkewSystem& sys, const LinearPotential& phi, std::size_t N,
                         double eps, std::size_t max_len, const CoverOptions& opt) {
  InversePressureEngine engine(sys, eps, opt);
  auto f = [&](double lambda) { return std::log(engine.m_minus_finite(lambda, phi, N, max_len)); };
  double lo = -1.0;
  double hi = 1.0;
  while (f(lo) < 0.0) lo -= 2.0 * (hi - lo);
  while (f(hi) > 0.0) hi += 2.0 * (hi - lo);
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SkewSystem iterate_system(const SkewSystem& sys, std::size_t n, std::size_t alphabet_cap) {
  if (n == 0) throw Error(ErrorCode::kInvalidInput, "iterate order must be >= 1");
  if (n == 1) return sys;
  const auto& A = sys.transitions();
  std::vector<Word> words;
  for (Symbol s = 0; s < A.size(); ++s) {
    for_each_forward_word(A, s, n, [&](const Word& w) {
      words.push_back(w);
      if (words.size() > alphabet_cap) {
        throw Error(ErrorCode::kResourceLimit, "iterate alphabet exceeds " +
                                                   std::to_string(alphabet_cap) + " words");
      }
    });
  }
  BranchSpec spec;
  std::vector<FiberMap> fibers;
  const std::size_t d = words.size();
  std::vector<std::vector<int>> rows(d, std::vector<int>(d, 0));
  for (std::size_t i = 0; i < d; ++i) {
    const auto& u = words[i];
    spec.intervals.push_back(cylinder_interval(sys.base(), u));
    double slope = 1.0;
    FiberMap g = sys.fiber(u.front());
    for (std::size_t j = 0; j < n; ++j) slope *= sys.base().slope(u[j]);
    for (std::size_t j = 1; j < n; ++j) g = FiberMap::compose(sys.fiber(u[j]), g);
    spec.slopes.push_back(slope);
    fibers.push_back(std::move(g));
    for (std::size_t j = 0; j < d; ++j) rows[i][j] = A(u.back(), words[j].front()) ? 1 : 0;
  }
  spec.admissibility = TransitionMatrix(rows);
  return SkewSystem(MarkovMap(std::move(spec)), std::move(fibers), std::nullopt,
                    sys.id() + "^" + std::to_string(n));
}

TsnResult t_s_n_eps(const SkewSystem& sys, std::size_t n, double eps,
                    const std::vector<std::size_t>& m_range, double tol, const CoverOptions& opt) {
  const SkewSystem iter = iterate_system(sys, n);
  InversePressureEngine engine(iter, eps, opt);
  TsnResult out;
  auto f = [&](double t) {
    const double v = engine.estimate(LinearPotential::stable(t), m_range).extrapolated;
    out.evaluations.emplace_back(t, v);
    return v;
  };
  const double hi = iter.base().info().h_top / std::abs(std::log(iter.chi_s())) + 1.0;
  out.root = bowen_root(f, 0.0, hi, tol);
  return out;
}

double rho_schedule(double eps, double rho, std::size_t n, double chi_u, double eps0) {
  if (!(rho > 0.0) || !(rho < 1.0 / chi_u)) {
    throw Error(ErrorCode::kRhoOutOfRange,
                "rho = " + std::to_string(rho) + " is outside (0, 1/chi_u)");
  }
  if (!(eps > 0.0) || eps >= eps0) {
    throw Error(ErrorCode::kEpsilonTooLarge, "eps must lie in (0, eps0)");
  }
  return eps * std::pow(rho, static_cast<double>(n));
}

EpsSweep inverse_pressure_sweep(const SkewSystem& sys, const LinearPotential& phi,
                                const std::vector<std::size_t>& m_range, const CoverOptions& opt,
                                double slack) {
  EpsSweep out;
  for (double div : {2.0, 4.0, 8.0}) {
    out.estimates.push_back(inverse_pressure_estimate(sys, phi, sys.eps0() / div, m_range, opt));
    const auto& e = out.estimates;
    if (e.size() >= 2 && e.back().extrapolated + slack < e[e.size() - 2].extrapolated) {
      out.monotone = false;
    }
  }
  return out;
}

}  // namespace invp
