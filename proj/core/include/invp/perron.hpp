#pragma once

#include <cstddef>
#include <vector>

namespace invp {

struct PerronResult {
  double value = 0.0;        // spectral radius
  double lower = 0.0;        // Collatz-Wielandt lower bound at termination
  double upper = 0.0;        // Collatz-Wielandt upper bound at termination
  std::size_t iterations = 0;
  std::size_t period = 1;    // cyclicity of the irreducible pattern
};

// Spectral radius of a nonnegative irreducible d x d matrix (row-major).
// Periodic patterns are handled by iterating M^period, whose dominant
// eigenvalue is then simple in modulus on every cyclic class. Iteration stops
// once the Collatz-Wielandt bracket has relative width <= rel_tol.
PerronResult perron_root(const std::vector<double>& matrix, std::size_t d, double rel_tol = 1e-12,
                         std::size_t max_iterations = 100000);

// Period (gcd of cycle lengths) of the directed graph of a 0/1 pattern.
// Assumes the pattern is strongly connected.
std::size_t pattern_period(const std::vector<double>& matrix, std::size_t d);

}  // namespace invp
