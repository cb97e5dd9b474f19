#include "invp/skew_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "invp/error.hpp"

namespace invp {

namespace {

constexpr double kMembershipTol = 1e-12;

double default_eps0(const MarkovMap& base) {
  double w = std::numeric_limits<double>::infinity();
  for (Symbol a = 0; a < base.alphabet_size(); ++a) w = std::min(w, base.branch(a).length());
  return 0.5 * w;
}

using StateKey = std::pair<std::vector<double>, std::size_t>;

StateKey key_of(const FiberMap& g, std::size_t column_class) {
  std::vector<double> flat;
  flat.reserve(3 * g.stages().size());
  for (const auto& s : g.stages()) {
    flat.push_back(s.c0);
    flat.push_back(s.c1);
    flat.push_back(s.c2);
  }
  return {std::move(flat), column_class};
}

bool in_image(const FiberMap& g, double y) {
  const auto im = g.image();
  return im.lo - kMembershipTol <= y && y <= im.hi + kMembershipTol;
}

double clamp_unit(double y) { return std::clamp(y, 0.0, 1.0); }

// Depth-first search for a backward word of length `depth`, admissible after
// `after`, whose fiber cylinder contains y.
bool find_witness(const SkewSystem& sys, Symbol after, double y, std::size_t depth, Word& out) {
  if (depth == 0) return true;
  const auto& A = sys.transitions();
  for (Symbol c = 0; c < sys.alphabet_size(); ++c) {
    if (!A(c, after) || !in_image(sys.fiber(c), y)) continue;
    out.push_back(c);
    if (find_witness(sys, c, clamp_unit(sys.fiber(c).inverse(y)), depth - 1, out)) return true;
    out.pop_back();
  }
  return false;
}

}  // namespace

SkewSystem::SkewSystem(MarkovMap base, std::vector<FiberMap> fibers, std::optional<double> eps0,
                       std::string id)
    : base_(std::move(base)), fibers_(std::move(fibers)), id_(std::move(id)) {
  if (fibers_.size() != base_.alphabet_size()) {
    throw Error(ErrorCode::kCountMismatch, std::to_string(fibers_.size()) + " fiber maps for " +
                                               std::to_string(base_.alphabet_size()) + " branches");
  }
  lambda_s_ = std::numeric_limits<double>::infinity();
  chi_s_ = 0.0;
  for (const auto& g : fibers_) {
    g.validate();
    lambda_s_ = std::min(lambda_s_, g.inf_derivative());
    chi_s_ = std::max(chi_s_, g.sup_derivative());
    affine_ = affine_ && g.is_affine();
  }
  eps0_ = eps0.value_or(default_eps0(base_));
  if (!(eps0_ > 0.0)) throw Error(ErrorCode::kInvalidInput, "shadowing scale must be positive");
}

SkewSystem build_system(BranchSpec base, std::vector<FiberMap> fibers, std::optional<double> eps0,
                        std::string id) {
  return SkewSystem(MarkovMap(std::move(base)), std::move(fibers), eps0, std::move(id));
}

bool is_certified(const SkewSystem& sys, const LambdaPoint& p, double tol) {
  if (p.itinerary.empty() || !sys.transitions().admissible_forward(p.itinerary)) return false;
  if (!p.witness.empty() && !sys.transitions()(p.witness.front(), p.itinerary.front())) return false;
  if (!sys.transitions().admissible_backward(p.witness)) return false;
  const auto cyl = fiber_cylinder(sys, p.witness);
  return cyl.lo - tol <= p.fiber && p.fiber <= cyl.hi + tol;
}

LambdaPoint sample_lambda_point(const SkewSystem& sys, std::mt19937_64& rng,
                                std::size_t itinerary_depth, std::size_t witness_depth) {
  const auto& A = sys.transitions();
  const std::size_t d = sys.alphabet_size();
  auto pick = [&](const std::vector<Symbol>& options) {
    return options[static_cast<std::size_t>(unit_uniform(rng) * options.size())];
  };
  LambdaPoint p;
  std::vector<Symbol> all(d);
  for (Symbol a = 0; a < d; ++a) all[a] = a;
  p.itinerary.push_back(pick(all));
  while (p.itinerary.size() < std::max<std::size_t>(itinerary_depth, 1)) {
    std::vector<Symbol> next;
    for (Symbol b = 0; b < d; ++b) {
      if (A(p.itinerary.back(), b)) next.push_back(b);
    }
    p.itinerary.push_back(pick(next));
  }
  const auto cyl = cylinder_interval(sys.base(), p.itinerary);
  p.base = cyl.lo + unit_uniform(rng) * cyl.length();
  Symbol last = p.itinerary.front();
  for (std::size_t i = 0; i < witness_depth; ++i) {
    std::vector<Symbol> prev;
    for (Symbol a = 0; a < d; ++a) {
      if (A(a, last)) prev.push_back(a);
    }
    last = pick(prev);
    p.witness.push_back(last);
  }
  double y = unit_uniform(rng);
  for (auto it = p.witness.rbegin(); it != p.witness.rend(); ++it) y = sys.fiber(*it)(y);
  p.fiber = y;
  return p;
}

double phi_s(const SkewSystem& sys, Symbol a) {
  const auto& g = sys.fiber(a);
  if (!g.is_affine()) {
    throw Error(ErrorCode::kUnsupported, "phi_s by symbol needs an affine fiber; pass a point");
  }
  return std::log(g.ratio());
}

double phi_s(const SkewSystem& sys, Symbol a, double fiber) {
  return std::log(sys.fiber(a).derivative(fiber));
}

double phi_s(const SkewSystem& sys, const LambdaPoint& p) {
  return phi_s(sys, p.itinerary.front(), p.fiber);
}

std::vector<double> stable_potential(const SkewSystem& sys) {
  std::vector<double> out(sys.alphabet_size());
  for (Symbol a = 0; a < out.size(); ++a) out[a] = phi_s(sys, a);
  return out;
}

Interval fiber_cylinder(const SkewSystem& sys, std::span<const Symbol> backward_word) {
  if (!sys.transitions().admissible_backward(backward_word)) {
    throw Error(ErrorCode::kInadmissible,
                "backward word " + word_to_string(backward_word) + " is not admissible");
  }
  Interval iv{0.0, 1.0};
  for (auto it = backward_word.rbegin(); it != backward_word.rend(); ++it) {
    iv = sys.fiber(*it).image_of(iv);
  }
  return iv;
}

std::vector<BranchState> backward_states(const SkewSystem& sys, Symbol s, std::size_t m,
                                         std::size_t cap) {
  const auto& A = sys.transitions();
  const auto& cls = A.column_class();
  std::vector<BranchState> level{{Word{}, FiberMap::affine(1.0, 0.0), s}};
  for (std::size_t depth = 0; depth < m; ++depth) {
    std::vector<BranchState> next;
    std::map<StateKey, std::size_t> seen;
    for (const auto& st : level) {
      for (Symbol p = 0; p < sys.alphabet_size(); ++p) {
        if (!A(p, st.last)) continue;
        FiberMap g = depth == 0 ? sys.fiber(p) : FiberMap::compose(st.map, sys.fiber(p));
        auto [it, inserted] = seen.emplace(key_of(g, cls[p]), next.size());
        if (!inserted) continue;
        Word w = st.word;
        w.push_back(p);
        next.push_back({std::move(w), std::move(g), p});
        if (next.size() > cap) {
          throw Error(ErrorCode::kResourceLimit, "more than " + std::to_string(cap) +
                                                     " backward branch classes at depth " +
                                                     std::to_string(depth + 1));
        }
      }
    }
    level = std::move(next);
  }
  return level;
}

std::vector<Interval> stable_slice_sample(const SkewSystem& sys, Symbol s, std::size_t m,
                                          std::size_t cap) {
  if (m == 0) return {{0.0, 1.0}};
  std::vector<Interval> out;
  for (const auto& st : backward_states(sys, s, m, cap)) out.push_back(st.map.image());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Interval> stable_slice_sample(const SkewSystem& sys, const LambdaPoint& x, std::size_t m,
                                          std::size_t cap) {
  return stable_slice_sample(sys, x.itinerary.front(), m, cap);
}

OverlapPartition overlap_classes(const SkewSystem& sys, double tol) {
  OverlapPartition out;
  const std::size_t d = sys.alphabet_size();
  if (!sys.affine()) {
    for (Symbol a = 0; a < d; ++a) out.classes.push_back({a});
    return out;
  }
  std::vector<bool> used(d, false);
  for (Symbol a = 0; a < d; ++a) {
    if (used[a]) continue;
    std::vector<Symbol> cls{a};
    used[a] = true;
    for (Symbol b = a + 1; b < d; ++b) {
      if (used[b]) continue;
      const auto& ga = sys.fiber(a);
      const auto& gb = sys.fiber(b);
      if (std::abs(ga.ratio() - gb.ratio()) <= tol && std::abs(ga.offset() - gb.offset()) <= tol) {
        cls.push_back(b);
        used[b] = true;
      }
    }
    out.classes.push_back(std::move(cls));
  }
  out.certified = true;
  return out;
}

PreimageProfile preimage_profile(const SkewSystem& sys, const ProfileOptions& opt) {
  PreimageProfile out;
  const auto part = overlap_classes(sys);
  out.classes = part.classes;

  bool disjoint = part.certified && sys.transitions().is_full();
  if (disjoint) {
    std::vector<Interval> images;
    for (const auto& c : part.classes) images.push_back(sys.fiber(c.front()).image());
    std::sort(images.begin(), images.end());
    for (std::size_t i = 1; i < images.size(); ++i) {
      if (images[i].lo <= images[i - 1].hi + kMembershipTol) disjoint = false;
    }
  }
  if (disjoint) {
    out.certified = true;
    out.d_prime = std::numeric_limits<std::size_t>::max();
    for (const auto& c : part.classes) {
      out.d_prime = std::min(out.d_prime, c.size());
      out.d_dprime = std::max(out.d_dprime, c.size());
    }
    return out;
  }

  std::mt19937_64 rng(opt.seed);
  out.d_prime = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const auto p = sample_lambda_point(sys, rng, 4, opt.depth);
    const auto n = preimages_of_point(sys, p).size();
    out.d_prime = std::min(out.d_prime, n);
    out.d_dprime = std::max(out.d_dprime, n);
  }
  out.resolution = std::pow(sys.chi_s(), static_cast<double>(opt.depth));
  return out;
}

std::vector<LambdaPoint> preimages_of_point(const SkewSystem& sys, const LambdaPoint& p) {
  if (p.depth() < 1) {
    throw Error(ErrorCode::kDepthExhausted, "point carries no membership certificate");
  }
  std::vector<LambdaPoint> out;
  const Symbol s = p.itinerary.front();
  for (Symbol b = 0; b < sys.alphabet_size(); ++b) {
    if (!sys.transitions()(b, s) || !in_image(sys.fiber(b), p.fiber)) continue;
    const double y = clamp_unit(sys.fiber(b).inverse(p.fiber));
    Word witness;
    if (!find_witness(sys, b, y, p.depth() - 1, witness)) continue;
    LambdaPoint q;
    q.itinerary.reserve(p.itinerary.size() + 1);
    q.itinerary.push_back(b);
    q.itinerary.insert(q.itinerary.end(), p.itinerary.begin(), p.itinerary.end());
    q.base = sys.base().inverse(b, p.base);
    q.fiber = y;
    q.witness = std::move(witness);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<PhasePoint> Prehistory::points(const MarkovMap& map) const {
  const auto xs = base.points(map);
  std::vector<PhasePoint> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = {xs[i], fiber_orbit[i]};
  return out;
}

Prehistory make_prehistory(const SkewSystem& sys, Word itinerary, double base_anchor,
                           double fiber_anchor, Word backward_word) {
  if (itinerary.empty()) throw Error(ErrorCode::kInvalidInput, "anchor needs an itinerary");
  Prehistory c;
  c.base = {std::move(itinerary), base_anchor, std::move(backward_word)};
  (void)c.base.points(sys.base());  // admissibility
  c.fiber_orbit.reserve(c.length() + 1);
  c.fiber_orbit.push_back(fiber_anchor);
  for (auto a : c.base.backward_word) {
    const double y = c.fiber_orbit.back();
    if (!in_image(sys.fiber(a), y)) {
      throw Error(ErrorCode::kInadmissible, "fiber orbit leaves [0,1] along the backward word");
    }
    c.fiber_orbit.push_back(clamp_unit(sys.fiber(a).inverse(y)));
  }
  return c;
}

Interval shadowed_fiber_interval(const SkewSystem& sys, const Prehistory& c, double eps) {
  const auto& w = c.base.backward_word;
  Interval out{c.fiber_orbit[0] - eps, c.fiber_orbit[0] + eps};
  out = intersect(out, {0.0, 1.0});
  // G_i = g_{a_1} o ... o g_{a_i} maps the eps-ball around y_{-i} forward.
  for (std::size_t i = 1; i <= w.size(); ++i) {
    Interval ball = intersect({c.fiber_orbit[i] - eps, c.fiber_orbit[i] + eps}, {0.0, 1.0});
    for (std::size_t j = i; j-- > 0;) ball = sys.fiber(w[j]).image_of(ball);
    out = intersect(out, ball);
  }
  return out;
}

double distortion_ratio(const SkewSystem& sys, const Prehistory& c, const Prehistory& shadowed,
                        double eps) {
  const std::size_t m = c.length();
  if (shadowed.length() != m) {
    throw Error(ErrorCode::kNotShadowed, "prehistories have different lengths");
  }
  const auto pc = c.points(sys.base());
  const auto ps = shadowed.points(sys.base());
  for (std::size_t i = 0; i <= m; ++i) {
    const double dist = std::max(std::abs(pc[i].base - ps[i].base), std::abs(pc[i].fiber - ps[i].fiber));
    if (!(dist < eps)) {
      throw Error(ErrorCode::kNotShadowed, "term " + std::to_string(i) + " is " +
                                               std::to_string(dist) + " apart");
    }
  }
  double log_ratio = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    log_ratio += std::log(sys.fiber(shadowed.base.backward_word[i - 1]).derivative(ps[i].fiber));
    log_ratio -= std::log(sys.fiber(c.base.backward_word[i - 1]).derivative(pc[i].fiber));
  }
  return std::exp(log_ratio);
}

DistortionSample measure_distortion(const SkewSystem& sys, double eps, std::size_t max_len,
                                    std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DistortionSample out;
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(std::log(1.0 / eps) / std::log(sys.base().info().min_slope)));
  for (std::size_t n = 0; n < pairs; ++n) {
    const std::size_t m = n % (max_len + 1);
    const auto x = sample_lambda_point(sys, rng, std::max<std::size_t>(k, 1), m);
    const auto c = make_prehistory(sys, x.itinerary, x.base, x.fiber, x.witness);
    // Shadowing partner: same base cylinder (length <= eps), fiber drawn from
    // the interior of the shadowed interval.
    const auto cyl = cylinder_interval(sys.base(), x.itinerary);
    const double base = cyl.lo + (0.0005 + 0.999 * unit_uniform(rng)) * cyl.length();
    const auto fib = shadowed_fiber_interval(sys, c, eps);
    const double y = fib.lo + (0.0005 + 0.999 * unit_uniform(rng)) * fib.length();
    const auto s = make_prehistory(sys, x.itinerary, base, y, x.witness);
    const double r = distortion_ratio(sys, c, s, eps);
    if (out.pairs == 0) {
      out.min_ratio = out.max_ratio = r;
    } else {
      out.min_ratio = std::min(out.min_ratio, r);
      out.max_ratio = std::max(out.max_ratio, r);
    }
    ++out.pairs;
  }
  out.c1 = std::max(out.max_ratio, 1.0 / out.min_ratio);
  return out;
}

double lipschitz_diagnostic(const SkewSystem& sys,
                            std::span<const std::pair<LambdaPoint, LambdaPoint>> pairs) {
  double best = 0.0;
  for (const auto& [p, q] : pairs) {
    const double dist = std::max(std::abs(p.base - q.base), std::abs(p.fiber - q.fiber));
    if (!(dist > 0.0)) throw Error(ErrorCode::kInvalidInput, "lipschitz pair is not distinct");
    best = std::max(best, std::abs(phi_s(sys, p) - phi_s(sys, q)) / dist);
  }
  return best;
}

std::vector<std::pair<LambdaPoint, LambdaPoint>> sample_lambda_pairs(const SkewSystem& sys,
                                                                     std::size_t n,
                                                                     std::uint64_t seed,
                                                                     bool same_branch) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<LambdaPoint, LambdaPoint>> out;
  out.reserve(n);
  while (out.size() < n) {
    auto p = sample_lambda_point(sys, rng, 4, 12);
    auto q = sample_lambda_point(sys, rng, 4, 12);
    if (same_branch && p.itinerary.front() != q.itinerary.front()) continue;
    if (p.base == q.base && p.fiber == q.fiber) continue;
    out.emplace_back(std::move(p), std::move(q));
  }
  return out;
}

}  // namespace invp
