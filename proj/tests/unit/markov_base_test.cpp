#include <cmath>
#include <limits>
#include <random>

#include "test_util.hpp"

#include "invp/markov_base.hpp"
#include "invp/zoo.hpp"

using namespace invp;
using invp::test::full_shift_spec;
using invp::test::golden_matrix;

TEST_CASE("validate_system: entropy of the full and golden-mean shifts") {
  CHECK(validate_system(full_shift_spec(2)).h_top == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const auto golden = zoo::golden_mean();
  CHECK(golden.base().info().h_top ==
        doctest::Approx(std::log((1.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-12));
  CHECK(golden.base().info().irreducible);
}

TEST_CASE("validate_system: contracting branch is rejected") {
  auto spec = full_shift_spec(2);
  spec.slopes[1] = 0.9;
  CHECK_ERROR(validate_system(spec), ErrorCode::kNotExpanding);
}

TEST_CASE("TransitionMatrix: irreducibility and column classes") {
  CHECK(TransitionMatrix({{1, 0}, {0, 1}}).is_irreducible() == false);
  CHECK(golden_matrix().is_irreducible());
  const auto full = TransitionMatrix::full(3);
  const auto& cls = full.column_class();
  CHECK(cls[0] == cls[1]);
  CHECK(cls[1] == cls[2]);
  CHECK(golden_matrix().column_class()[0] != golden_matrix().column_class()[1]);
}

TEST_CASE("base_preimage_bounds") {
  auto b = base_preimage_bounds(TransitionMatrix::full(2));
  CHECK(b.dmin == 2);
  CHECK(b.dmax == 2);
  b = base_preimage_bounds(golden_matrix());
  CHECK(b.dmin == 1);
  CHECK(b.dmax == 2);
  b = base_preimage_bounds(TransitionMatrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
  CHECK(b.dmin == 1);
  CHECK(b.dmax == 1);
}

TEST_CASE("enumerate_backward_words: small cases") {
  CHECK(enumerate_backward_words(TransitionMatrix::full(2), 0, 2).size() == 4);
  CHECK(enumerate_backward_words(golden_matrix(), 1, 2).size() == 2);
  const auto empty = enumerate_backward_words(golden_matrix(), 0, 0);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].empty());
}

TEST_CASE("enumerate_backward_words: count law, admissibility and order") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + rng() % 3;
    const auto a = invp::test::random_irreducible(rng, d);
    const Symbol s = Symbol(rng() % d);
    const std::size_t m = rng() % 6;
    const auto words = enumerate_backward_words(a, s, m);
    CHECK(words.size() == count_backward_words(a, s, m));
    for (std::size_t i = 0; i < words.size(); ++i) {
      REQUIRE(words[i].size() == m);
      if (m > 0) CHECK(a(words[i][0], s));
      CHECK(a.admissible_backward(words[i]));
      if (i > 0) CHECK(words[i - 1] < words[i]);
    }
  }
}

TEST_CASE("enumerate_backward_words: cap") {
  CHECK_ERROR(enumerate_backward_words(TransitionMatrix::full(2), 0, 12, 100),
              ErrorCode::kResourceLimit);
}

TEST_CASE("min_plus_backward: examples") {
  const std::vector<double> phi{-1.0, -2.0};
  CHECK(min_plus_backward(TransitionMatrix::full(2), phi, 0, 3) == doctest::Approx(-6.0));
  CHECK(min_plus_backward(golden_matrix(), phi, 0, 0) == 0.0);
}

TEST_CASE("min_plus_backward: agrees with exhaustive enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 2 + rng() % 3;
    const auto a = invp::test::random_irreducible(rng, d);
    std::vector<double> phi(d);
    for (auto& v : phi) v = u(rng);
    const Symbol s = Symbol(rng() % d);
    const std::size_t m = rng() % 7;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : enumerate_backward_words(a, s, m)) {
      double sum = 0.0;
      for (Symbol x : w) sum += phi[x];
      best = std::min(best, sum);
    }
    CHECK(min_plus_backward(a, phi, s, m) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("cylinder_interval") {
  const MarkovMap doubling(full_shift_spec(2));
  const Word w0{0}, w01{0, 1};
  CHECK(cylinder_interval(doubling, w0) == Interval{0.0, 0.5});
  CHECK(cylinder_interval(doubling, w01) == Interval{0.25, 0.5});

  const auto golden = zoo::golden_mean();
  const Word bad{1, 1};
  CHECK_ERROR(cylinder_interval(golden.base(), bad), ErrorCode::kInadmissible);
}

TEST_CASE("cylinder_interval: cylinders of one depth tile [0, 1]") {
  const auto golden = zoo::golden_mean();
  const auto& a = golden.transitions();
  for (std::size_t k = 1; k <= 6; ++k) {
    double total = 0.0;
    for (Symbol s = 0; s < 2; ++s) {
      for (auto w : enumerate_backward_words(a, s, k - 1)) {
        // A backward chain read in reverse is a forward word ending at s.
        std::reverse(w.begin(), w.end());
        w.push_back(s);
        total += cylinder_interval(golden.base(), w).length();
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("count_forward_words matches row sums of powers") {
  CHECK(count_forward_words(TransitionMatrix::full(3), 0, 4) == 27);
  // Golden mean: words of length k from 1 are Fibonacci numbers.
  CHECK(count_forward_words(golden_matrix(), 1, 1) == 1);
  CHECK(count_forward_words(golden_matrix(), 1, 5) == 5);
  CHECK(count_forward_words(golden_matrix(), 0, 5) == 8);
}

TEST_CASE("dK_distance") {
  std::vector<PhasePoint> p(10, PhasePoint{0.2, 0.3});
  auto r = dK_distance(p, p, 2.0, 10);
  CHECK(r.value == 0.0);

  auto q = p;
  q[0].fiber += 0.01;
  r = dK_distance(p, q, 2.0, 10);
  CHECK(r.value == doctest::Approx(0.01).epsilon(1e-12));

  const double c = 0.05;
  std::vector<PhasePoint> shifted(10);
  for (std::size_t i = 0; i < 10; ++i) shifted[i] = {p[i].base + c, p[i].fiber};
  r = dK_distance(p, shifted, 2.0, 10);
  CHECK(r.value == doctest::Approx(c * (2.0 - std::pow(2.0, -10) * 2.0)).epsilon(1e-12));
  CHECK(r.tail_bound > 0.0);
}

TEST_CASE("dK_distance is a pseudometric on sampled points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    std::vector<PhasePoint> v(8);
    for (auto& x : v) x = {u(rng), u(rng)};
    return v;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = draw(), b = draw(), c = draw();
    const double ab = dK_distance(a, b, 3.0, 8).value;
    CHECK(ab == doctest::Approx(dK_distance(b, a, 3.0, 8).value));
    CHECK(dK_distance(a, c, 3.0, 8).value <= ab + dK_distance(b, c, 3.0, 8).value + 1e-12);
  }
}
