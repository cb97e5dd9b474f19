#include "invp/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace invp {

std::size_t pattern_period(const std::vector<double>& matrix, std::size_t d) {
  if (d == 0) return 1;
  std::vector<long> level(d, -1);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const auto a = q.front();
    q.pop();
    for (std::size_t b = 0; b < d; ++b) {
      if (matrix[a * d + b] > 0.0 && level[b] < 0) {
        level[b] = level[a] + 1;
        q.push(b);
      }
    }
  }
  long g = 0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      if (matrix[a * d + b] > 0.0 && level[a] >= 0 && level[b] >= 0) {
        g = std::gcd(g, std::abs(level[a] + 1 - level[b]));
      }
    }
  }
  return g == 0 ? 1 : static_cast<std::size_t>(g);
}

namespace {

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b, std::size_t d) {
  std::vector<double> c(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = a[i * d + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) c[i * d + j] += aik * b[k * d + j];
    }
  }
  return c;
}

}  // namespace

PerronResult perron_root(const std::vector<double>& matrix, std::size_t d, double rel_tol,
                         std::size_t max_iterations) {
  PerronResult out;
  out.period = pattern_period(matrix, d);
  std::vector<double> m = matrix;
  for (std::size_t p = 1; p < out.period; ++p) m = multiply(m, matrix, d);

  std::vector<double> x(d, 1.0);
  std::vector<double> y(d, 0.0);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += m[i * d + j] * x[j];
      y[i] = s;
    }
    // Bounds only over coordinates still carrying mass; with M^p the vector
    // is supported on every cyclic class because x starts strictly positive.
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (x[i] > 0.0) {
        const double r = y[i] / x[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      norm = std::max(norm, y[i]);
    }
    if (norm == 0.0) {
      lo = hi = 0.0;
      break;
    }
    for (std::size_t i = 0; i < d; ++i) x[i] = y[i] / norm;
    if (hi - lo <= rel_tol * hi) break;
  }
  out.iterations = it + 1;
  const double inv_p = 1.0 / static_cast<double>(out.period);
  out.lower = std::pow(lo, inv_p);
  out.upper = std::pow(hi, inv_p);
  out.value = std::pow(0.5 * (lo + hi), inv_p);
  return out;
}

}  // namespace invp
