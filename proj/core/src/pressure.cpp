#include "invp/pressure.hpp"

#include <cmath>
#include <limits>

#include "invp/error.hpp"
#include "invp/perron.hpp"

namespace invp {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

std::size_t encode(std::span<const Symbol> w, std::size_t d) {
  std::size_t idx = 0;
  for (auto s : w) idx = idx * d + s;
  return idx;
}

}  // namespace

Potential Potential::depth1(std::vector<double> values, std::string tag) {
  Potential p;
  p.d_ = values.size();
  p.depth_ = 1;
  p.table_ = std::move(values);
  p.tag_ = std::move(tag);
  return p;
}

Potential Potential::from_table(std::size_t d, std::size_t depth, std::vector<double> table,
                                std::string tag) {
  if (depth == 0) throw Error(ErrorCode::kInvalidInput, "potential depth must be >= 1");
  if (table.size() != ipow(d, depth, std::numeric_limits<std::size_t>::max() / 2)) {
    throw Error(ErrorCode::kInvalidInput, "potential table size is not d^depth");
  }
  Potential p;
  p.d_ = d;
  p.depth_ = depth;
  p.table_ = std::move(table);
  p.tag_ = std::move(tag);
  return p;
}

double Potential::operator()(std::span<const Symbol> word) const {
  if (word.size() != depth_) throw Error(ErrorCode::kInvalidInput, "potential window size");
  return table_[encode(word, d_)];
}

Potential Potential::scaled(double t, double shift) const {
  Potential p = *this;
  for (auto& v : p.table_) v = t * v + shift;
  return p;
}

PressureValue pressure_exact(const TransitionMatrix& a, const Potential& phi, double t, double c) {
  if (phi.depth() != 1) {
    throw Error(ErrorCode::kNotRecoded, "depth-" + std::to_string(phi.depth()) +
                                            " potential; recode to depth 1 first");
  }
  const std::size_t d = a.size();
  if (phi.alphabet_size() != d) throw Error(ErrorCode::kInvalidInput, "potential size mismatch");
  if (!a.is_irreducible()) throw Error(ErrorCode::kReducible, "transition graph is reducible");
  // Factor out the largest weight so exp() never overflows.
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < d; ++b) shift = std::max(shift, t * phi.at(b));
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (a(i, j)) m[i * d + j] = std::exp(t * phi.at(j) - shift);
    }
  }
  const auto r = perron_root(m, d);
  PressureValue out;
  out.method = PressureValue::Method::kExactSpectral;
  out.value = std::log(r.value) + shift - c;
  out.iterations = r.iterations;
  out.residual = (r.upper - r.lower) / r.upper;
  return out;
}

Recoded recode_depth1(const TransitionMatrix& a, const Potential& phi, std::size_t depth_cap) {
  const std::size_t p = phi.depth();
  const std::size_t d = a.size();
  if (p > depth_cap) {
    throw Error(ErrorCode::kResourceLimit, "potential depth " + std::to_string(p) +
                                               " exceeds recoding cap " + std::to_string(depth_cap));
  }
  Recoded out;
  if (p == 1) {
    out.transitions = a;
    out.potential = phi;
    for (Symbol s = 0; s < d; ++s) out.alphabet.push_back({s});
    return out;
  }
  // Admissible p-words in lexicographic order.
  std::vector<Word> words;
  Word w;
  auto rec = [&](auto&& self) -> void {
    if (w.size() == p) {
      words.push_back(w);
      return;
    }
    for (Symbol s = 0; s < d; ++s) {
      if (!w.empty() && !a(w.back(), s)) continue;
      w.push_back(s);
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
  const std::size_t n = words.size();
  std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rows[i][j] = std::equal(words[i].begin() + 1, words[i].end(), words[j].begin()) ? 1 : 0;
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = phi(words[i]);
  out.transitions = TransitionMatrix(rows);
  out.potential = Potential::depth1(std::move(values), phi.tag() + " [recoded]");
  out.alphabet = std::move(words);
  return out;
}

std::size_t cylinder_depth_for(double eps, double min_slope) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidInput, "eps must be positive");
  if (eps >= 1.0) return 0;
  // Guard against log ratios landing a hair above an integer.
  const double k = std::log(1.0 / eps) / std::log(min_slope);
  return static_cast<std::size_t>(std::ceil(k - 1e-9));
}

PressureValue pressure_spanning(const TransitionMatrix& a, const Potential& phi, double t,
                                double c, std::size_t n, double eps, double min_slope,
                                std::size_t cap) {
  if (n == 0) throw Error(ErrorCode::kInvalidInput, "spanning estimate needs n >= 1");
  const auto rec = recode_depth1(a, phi);
  const std::size_t states = rec.transitions.size();
  if (states * n > cap) {
    throw Error(ErrorCode::kResourceLimit, "spanning sum exceeds enumeration cap");
  }
  const std::size_t k = cylinder_depth_for(eps, min_slope);
  const std::size_t p = phi.depth();
  const std::size_t free_symbols = k >= p - 1 ? k - (p - 1) : 0;

  // Forward transfer over window positions 0..n-1, then free continuation;
  // vectors are renormalized and the scale is kept in log form.
  std::vector<double> f(states);
  for (std::size_t u = 0; u < states; ++u) f[u] = std::exp(t * rec.potential.at(u) - c);
  double log_scale = 0.0;
  auto step = [&](bool weighted) {
    std::vector<double> g(states, 0.0);
    for (std::size_t u = 0; u < states; ++u) {
      if (f[u] == 0.0) continue;
      for (std::size_t v = 0; v < states; ++v) {
        if (rec.transitions(u, v)) {
          g[v] += f[u] * (weighted ? std::exp(t * rec.potential.at(v) - c) : 1.0);
        }
      }
    }
    double mx = 0.0;
    for (double x : g) mx = std::max(mx, x);
    for (double& x : g) x /= mx;
    log_scale += std::log(mx);
    f = std::move(g);
  };
  for (std::size_t j = 1; j < n; ++j) step(true);
  for (std::size_t j = 0; j < free_symbols; ++j) step(false);
  double total = 0.0;
  for (double x : f) total += x;

  const double h_top = std::log(perron_root(a.as_weights(), a.size()).value);
  PressureValue out;
  out.method = PressureValue::Method::kSpanningEstimate;
  out.n = n;
  out.eps = eps;
  out.k = k;
  out.raw = (log_scale + std::log(total)) / static_cast<double>(n);
  out.bias = static_cast<double>(free_symbols) * h_top / static_cast<double>(n);
  out.value = out.raw - out.bias;
  return out;
}

PressureValue pressure_spanning(const SkewSystem& sys, const Potential& phi, double t, double c,
                                std::size_t n, double eps, std::size_t cap) {
  // The fiber direction contracts in forward time; an eps-spanning set is
  // fixed by its base itineraries.
  return pressure_spanning(sys.transitions(), phi, t, c, n, eps, sys.base().info().min_slope, cap);
}

BowenRoot bowen_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw Error(ErrorCode::kInvalidInput, "bracket must satisfy lo < hi");
  BowenRoot out;
  out.tol = tol;
  constexpr int kGrid = 16;
  constexpr double kSlack = 1e-9;
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = f(lo + (hi - lo) * i / (kGrid - 1));
    ++out.evaluations;
    if (i > 0 && grid[i] > grid[i - 1] + kSlack) {
      throw Error(ErrorCode::kNotMonotone, "F increases between grid points " +
                                               std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }
  const double flo = grid.front();
  const double fhi = grid.back();
  // Endpoint values within rounding of zero count as roots.
  constexpr double kZero = 1e-12;
  if (flo < -kZero || fhi > kZero) {
    throw Error(ErrorCode::kNoSignChange, "F(lo) = " + std::to_string(flo) +
                                              ", F(hi) = " + std::to_string(fhi));
  }
  if (std::abs(flo) <= kZero || std::abs(fhi) <= kZero) {
    out.t_star = out.lo = out.hi = std::abs(flo) <= kZero ? lo : hi;
    return out;
  }
  // Start from the tightest grid bracket.
  for (int i = 1; i < kGrid; ++i) {
    if (grid[i] <= 0.0) {
      const double a = lo + (hi - lo) * (i - 1) / (kGrid - 1);
      const double b = lo + (hi - lo) * i / (kGrid - 1);
      if (grid[i] == 0.0) {
        out.t_star = out.lo = out.hi = b;
        return out;
      }
      lo = a;
      hi = b;
      break;
    }
  }
  while (hi - lo > 2.0 * tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    ++out.evaluations;
    if (v == 0.0) {
      lo = hi = mid;
      break;
    }
    (v > 0.0 ? lo : hi) = mid;
  }
  out.lo = lo;
  out.hi = hi;
  out.t_star = 0.5 * (lo + hi);
  return out;
}

BowenRoot t_s0(const SkewSystem& sys, double dprime, double tol) {
  if (!(dprime >= 1.0)) throw Error(ErrorCode::kInvalidInput, "d' must be >= 1");
  const auto phi = Potential::depth1(stable_potential(sys), "phi_s");
  const double c = std::log(dprime);
  const double hi = sys.base().info().h_top / std::abs(std::log(sys.chi_s())) + 1.0;
  return bowen_root(
      [&](double t) { return pressure_exact(sys.transitions(), phi, t, c).value; }, 0.0, hi, tol);
}

}  // namespace invp
