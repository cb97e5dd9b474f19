#include <cmath>
#include <random>

#include "test_util.hpp"

#include "invp/dimension_lab.hpp"
#include "invp/pressure.hpp"
#include "invp/zoo.hpp"

using namespace invp;

namespace {

const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);
const double kLog4 = std::log(4.0);
const double kGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

}  // namespace

TEST_CASE("pressure_exact: reference values") {
  const auto zero2 = Potential::depth1({0.0, 0.0});
  CHECK(pressure_exact(TransitionMatrix::full(2), zero2, 3.7, 0.0).value ==
        doctest::Approx(kLog2).epsilon(1e-12));
  CHECK(pressure_exact(invp::test::golden_matrix(), zero2, 1.0, 0.0).value ==
        doctest::Approx(0.48121182505960).epsilon(1e-12));

  const auto stable = Potential::depth1(std::vector<double>(4, std::log(1.0 / 3.0)));
  const double t = kLog2 / kLog3;
  CHECK(std::abs(pressure_exact(TransitionMatrix::full(4), stable, t, kLog2).value) < 1e-12);
  for (double s : {0.0, 0.3, 1.1}) {
    CHECK(pressure_exact(TransitionMatrix::full(4), stable, s, kLog2).value ==
          doctest::Approx(kLog4 - s * kLog3 - kLog2).epsilon(1e-12));
  }
}

TEST_CASE("pressure_exact: constant shift and depth guard") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  const auto a = invp::test::golden_matrix();
  for (int i = 0; i < 20; ++i) {
    const auto phi = Potential::depth1({u(rng), u(rng)});
    const double c = u(rng), t = u(rng);
    CHECK(pressure_exact(a, phi, t, c).value ==
          doctest::Approx(pressure_exact(a, phi, t, 0.0).value - c).epsilon(1e-12));
  }
  const auto deep = Potential::from_table(2, 2, {0.0, 0.1, 0.2, 0.3});
  CHECK_ERROR(pressure_exact(TransitionMatrix::full(2), deep, 1.0, 0.0), ErrorCode::kNotRecoded);
}

TEST_CASE("pressure_exact: strictly decreasing and Lipschitz in t for negative potentials") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, -0.1);
  for (int i = 0; i < 20; ++i) {
    const auto a = invp::test::random_irreducible(rng, 3);
    const auto phi = Potential::depth1({u(rng), u(rng), u(rng)});
    double sup = 0.0;
    for (double v : phi.table()) sup = std::max(sup, std::abs(v));
    double prev = pressure_exact(a, phi, -1.0, 0.0).value;
    for (double t = -0.75; t <= 2.0; t += 0.25) {
      const double cur = pressure_exact(a, phi, t, 0.0).value;
      CHECK(cur < prev);
      CHECK(prev - cur <= 0.25 * sup + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("recode_depth1: identity on depth 1, invariant pressure on depth 2") {
  const auto a = invp::test::golden_matrix();
  const auto phi = Potential::depth1({-0.4, 0.9});
  const auto same = recode_depth1(a, phi);
  CHECK(same.transitions == a);
  CHECK(same.potential.table() == phi.table());

  // phi(ab) = phi(a) written as a depth-2 table.
  const auto lifted = Potential::from_table(2, 2, {-0.4, -0.4, 0.9, 0.9});
  const auto rec = recode_depth1(TransitionMatrix::full(2), lifted);
  CHECK(rec.alphabet.size() == 4);
  const auto flat = Potential::depth1({-0.4, 0.9});
  CHECK(pressure_exact(rec.transitions, rec.potential, 1.3, 0.0).value ==
        doctest::Approx(pressure_exact(TransitionMatrix::full(2), flat, 1.3, 0.0).value)
            .epsilon(1e-12));

  const auto golden_rec = recode_depth1(a, Potential::from_table(2, 2, {0.0, 0.0, 0.0, 0.0}));
  CHECK(golden_rec.alphabet.size() == 3);
  CHECK(pressure_exact(golden_rec.transitions, golden_rec.potential, 1.0, 0.0).value ==
        doctest::Approx(kGolden).epsilon(1e-12));

  CHECK_ERROR(recode_depth1(TransitionMatrix::full(2), Potential::from_table(2, 2, {0, 0, 0, 0}), 1),
              ErrorCode::kResourceLimit);
}

TEST_CASE("cylinder_depth_for") {
  CHECK(cylinder_depth_for(1.0 / 64.0, 2.0) == 6);
  CHECK(cylinder_depth_for(1.0 / 16.0, 4.0) == 2);
}

TEST_CASE("pressure_spanning: bias-corrected estimates") {
  const auto zero = Potential::depth1({0.0, 0.0});
  const auto full = pressure_spanning(TransitionMatrix::full(2), zero, 1.0, 0.0, 16, 1.0 / 64.0, 2.0);
  CHECK(full.method == PressureValue::Method::kSpanningEstimate);
  CHECK(full.k == 6);
  CHECK(full.raw == doctest::Approx(kLog2 * 22.0 / 16.0).epsilon(1e-12));
  CHECK(std::abs(full.value - kLog2) <= 0.02);

  const auto golden = zoo::golden_mean();
  const auto g = pressure_spanning(golden, zero, 1.0, 0.0, 16, 1.0 / 64.0);
  CHECK(std::abs(g.value - kGolden) <= 0.02);

  const auto m2 = zoo::m2();
  const auto stable = Potential::depth1(stable_potential(m2));
  const double t = kLog3 / kLog4;
  const auto est = pressure_spanning(m2, stable, t, 0.0, 16, m2.eps0() / 4.0);
  CHECK(std::abs(est.value - pressure_exact(m2.transitions(), stable, t, 0.0).value) <= 0.02);
}

TEST_CASE("bowen_root") {
  const auto r = bowen_root([](double t) { return -t; }, -1.0, 1.0, 1e-9);
  CHECK(std::abs(r.t_star) <= 1e-9);
  CHECK_ERROR(bowen_root([](double t) { return 1.0 + t * 0.0; }, 0.0, 1.0), ErrorCode::kNoSignChange);
  CHECK_ERROR(bowen_root([](double t) { return std::cos(12.0 * t); }, 0.0, 1.0),
              ErrorCode::kNotMonotone);
}

TEST_CASE("t_s0: closed forms") {
  CHECK(std::abs(t_s0(zoo::m1(), 2.0, 1e-9).t_star - kLog2 / kLog3) <= 1e-6);
  CHECK(std::abs(t_s0(zoo::m2(), 1.0, 1e-9).t_star - kLog3 / kLog4) <= 1e-6);
  CHECK(std::abs(t_s0(zoo::m2(), 2.0, 1e-9).t_star - std::log(1.5) / kLog4) <= 1e-6);
  CHECK(t_s0(zoo::degenerate(), 2.0, 1e-9).t_star == doctest::Approx(0.0));
}

TEST_CASE("t_s0 agrees with the Moran root for separated affine models") {
  const std::vector<double> quarter{0.25, 0.25}, third{1.0 / 3.0, 1.0 / 3.0};
  CHECK(std::abs(t_s0(zoo::s2(), 1.0, 1e-12).t_star - moran_root(quarter)) <= 1e-9);
  CHECK(std::abs(t_s0(zoo::m1(), 2.0, 1e-12).t_star - moran_root(third)) <= 1e-9);
  const auto g = zoo::golden_mean();
  const std::vector<double> ratios{1.0 / 3.0, 1.0 / 3.0};
  CHECK(std::abs(t_s0(g, 1.0, 1e-12).t_star - moran_root(ratios, g.transitions())) <= 1e-9);
}
