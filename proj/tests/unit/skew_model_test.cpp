#include <cmath>
#include <random>

#include "test_util.hpp"

#include "invp/skew_model.hpp"
#include "invp/zoo.hpp"

using namespace invp;

namespace {

bool covered_by(const Interval& iv, const std::vector<Interval>& family) {
  for (const auto& f : family)
    if (f.contains(iv, 1e-12)) return true;
  return false;
}

}  // namespace

TEST_CASE("build_system: reference constants") {
  const auto m1 = zoo::m1();
  CHECK(m1.lambda_s() == doctest::Approx(1.0 / 3.0));
  CHECK(m1.chi_s() == doctest::Approx(1.0 / 3.0));
  CHECK(m1.chi_u() == 4.0);
  const auto m2 = zoo::m2();
  CHECK(m2.chi_s() == doctest::Approx(0.25));
  CHECK(m2.chi_u() == 3.0);
  CHECK(m2.affine());
  CHECK(m2.lambda_s() <= m2.chi_s());
}

TEST_CASE("build_system: rejects bad fibers") {
  auto spec = invp::test::full_shift_spec(2);
  CHECK_ERROR(build_system(spec, {FiberMap::affine(0.5, 0.0), FiberMap::affine(0.5, 0.7)}),
              ErrorCode::kImageEscapes);
  CHECK_ERROR(build_system(spec, {FiberMap::affine(0.5, 0.0)}), ErrorCode::kCountMismatch);
  CHECK_ERROR(build_system(spec, {FiberMap::affine(1.2, 0.0), FiberMap::affine(0.5, 0.0)}),
              ErrorCode::kContractionViolated);
}

TEST_CASE("phi_s") {
  CHECK(phi_s(zoo::m1(), 0) == doctest::Approx(-1.0986122887).epsilon(1e-10));
  CHECK(phi_s(zoo::m2(), 2) == doctest::Approx(-1.3862943611).epsilon(1e-10));

  const auto smooth = build_system(invp::test::full_shift_spec(2),
                                   {FiberMap::quadratic(0.0, 1.0 / 3.0, 0.01),
                                    FiberMap::quadratic(0.5, 1.0 / 3.0, 0.01)});
  CHECK(phi_s(smooth, 0, 0.0) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
  CHECK_ERROR(stable_potential(smooth), ErrorCode::kUnsupported);
}

TEST_CASE("fiber_cylinder") {
  const Word w00{0, 0}, w20{2, 0}, none{};
  const auto c1 = fiber_cylinder(zoo::m1(), w00);
  CHECK(c1.lo == doctest::Approx(0.0));
  CHECK(c1.hi == doctest::Approx(1.0 / 9.0));
  const auto c2 = fiber_cylinder(zoo::m2(), w20);
  CHECK(c2.lo == doctest::Approx(0.75));
  CHECK(c2.hi == doctest::Approx(13.0 / 16.0));
  CHECK(fiber_cylinder(zoo::m2(), none) == Interval{0.0, 1.0});
}

TEST_CASE("stable_slice_sample: reference slices") {
  const auto m1 = stable_slice_sample(zoo::m1(), 0, 2);
  REQUIRE(m1.size() == 4);
  const double lo[] = {0.0, 2.0 / 9.0, 6.0 / 9.0, 8.0 / 9.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m1[i].lo == doctest::Approx(lo[i]));
    CHECK(m1[i].length() == doctest::Approx(1.0 / 9.0));
  }
  const auto m2 = stable_slice_sample(zoo::m2(), 1, 1);
  REQUIRE(m2.size() == 2);
  CHECK(m2[0].hi == doctest::Approx(0.25));
  CHECK(m2[1].lo == doctest::Approx(0.75));

  const auto point = stable_slice_sample(zoo::degenerate(), 0, 5);
  REQUIRE(point.size() == 1);
  CHECK(point[0].length() == doctest::Approx(std::pow(0.25, 5)));
}

TEST_CASE("stable_slice_sample: deeper samples refine shallower ones") {
  for (const auto& sys : {zoo::m1(), zoo::m2(), zoo::golden_mean(), zoo::smooth_m1()}) {
    for (Symbol s = 0; s < sys.alphabet_size(); ++s) {
      for (std::size_t m = 0; m < 5; ++m) {
        const auto coarse = stable_slice_sample(sys, s, m);
        for (const auto& iv : stable_slice_sample(sys, s, m + 1)) CHECK(covered_by(iv, coarse));
      }
    }
  }
}

TEST_CASE("overlap_classes") {
  const auto m1 = overlap_classes(zoo::m1());
  CHECK(m1.certified);
  CHECK(m1.classes == std::vector<std::vector<Symbol>>{{0, 1}, {2, 3}});
  CHECK(overlap_classes(zoo::m2()).classes == std::vector<std::vector<Symbol>>{{0, 1}, {2}});
  CHECK(overlap_classes(zoo::s2()).classes == std::vector<std::vector<Symbol>>{{0}, {1}});
}

TEST_CASE("preimage_profile") {
  const auto m1 = preimage_profile(zoo::m1());
  CHECK(m1.certified);
  CHECK(m1.d_prime == 2);
  CHECK(m1.d_dprime == 2);
  const auto m2 = preimage_profile(zoo::m2());
  CHECK(m2.certified);
  CHECK(m2.d_prime == 1);
  CHECK(m2.d_dprime == 2);
  const auto s2 = preimage_profile(zoo::s2());
  CHECK(s2.d_prime == 1);
  CHECK(s2.d_dprime == 1);
}

TEST_CASE("preimages_of_point") {
  const auto m1 = zoo::m1();
  LambdaPoint p{{0}, 0.1, 0.0, {0, 0, 0, 0}};
  REQUIRE(is_certified(m1, p));
  const auto pre = preimages_of_point(m1, p);
  REQUIRE(pre.size() == 2);
  CHECK(pre[0].itinerary.front() == 0);
  CHECK(pre[1].itinerary.front() == 1);
  CHECK(pre[0].fiber == 0.0);

  const auto m2 = zoo::m2();
  const LambdaPoint top{{1}, 0.5, 1.0, {2, 2, 2}};
  const auto pre2 = preimages_of_point(m2, top);
  REQUIRE(pre2.size() == 1);
  CHECK(pre2[0].itinerary.front() == 2);
  CHECK(pre2[0].fiber == doctest::Approx(1.0));

  const LambdaPoint gap{{0}, 0.1, 0.5, {0}};
  CHECK(preimages_of_point(m1, gap).empty());
  const LambdaPoint bare{{0}, 0.1, 0.0, {}};
  CHECK_ERROR(preimages_of_point(m1, bare), ErrorCode::kDepthExhausted);
}

TEST_CASE("sampled points are certified and their preimages stay in Λ") {
  std::mt19937_64 rng(17);
  for (const auto& sys : {zoo::m1(), zoo::m2(), zoo::golden_mean()}) {
    for (int i = 0; i < 50; ++i) {
      const auto p = sample_lambda_point(sys, rng, 6, 10);
      REQUIRE(is_certified(sys, p));
      const auto pre = preimages_of_point(sys, p);
      CHECK(!pre.empty());
      for (const auto& q : pre) {
        CHECK(is_certified(sys, q));
        CHECK(sys.fiber(q.itinerary.front())(q.fiber) == doctest::Approx(p.fiber).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("distortion_ratio: affine fibers give exactly 1") {
  const auto m1 = zoo::m1();
  std::mt19937_64 rng(2);
  for (std::size_t m = 0; m <= 12; ++m) {
    Word w(m);
    for (auto& a : w) a = Symbol(rng() % 4);
    const auto cyl = fiber_cylinder(m1, w);
    const double y = cyl.lo + 0.3 * cyl.length();
    const double z = cyl.lo + 0.305 * cyl.length();
    const auto c = make_prehistory(m1, {0}, 0.1, y, w);
    const auto d = make_prehistory(m1, {0}, 0.1 + 1e-3, z, w);
    CHECK(distortion_ratio(m1, c, d, 0.01) == 1.0);
  }
  const auto sample = measure_distortion(m1, 0.01, 12, 200, 4);
  CHECK(sample.c1 == 1.0);
}

TEST_CASE("distortion_ratio: pairs that drift apart are rejected") {
  const auto m1 = zoo::m1();
  const Word w{0, 0};
  const auto c = make_prehistory(m1, {0}, 0.1, 0.0, w);
  const auto d = make_prehistory(m1, {0}, 0.1, 0.1, w);
  CHECK_ERROR(distortion_ratio(m1, c, d, 0.05), ErrorCode::kNotShadowed);
}

TEST_CASE("distortion: smooth fibers stay bounded and stable under resampling") {
  const auto sys = zoo::smooth_m1(0.02);
  const auto a = measure_distortion(sys, sys.eps0() / 4.0, 10, 500, 7);
  const auto b = measure_distortion(sys, sys.eps0() / 4.0, 10, 1000, 7);
  CHECK(a.c1 >= 1.0);
  CHECK(a.c1 <= 1.5);
  CHECK(a.min_ratio >= 1.0 / a.c1 - 1e-12);
  CHECK(a.max_ratio <= a.c1 + 1e-12);
  CHECK(std::abs(b.c1 - a.c1) <= 0.05 * a.c1);
}

TEST_CASE("lipschitz_diagnostic") {
  const auto m1 = zoo::m1();
  CHECK(lipschitz_diagnostic(m1, sample_lambda_pairs(m1, 200, 3, true)) == 0.0);
  CHECK(std::isfinite(lipschitz_diagnostic(m1, sample_lambda_pairs(m1, 200, 3, false))));

  const auto smooth = zoo::smooth_m1(0.02);
  const double l1 = lipschitz_diagnostic(smooth, sample_lambda_pairs(smooth, 10000, 9, true));
  const double l2 = lipschitz_diagnostic(smooth, sample_lambda_pairs(smooth, 20000, 9, true));
  CHECK(std::isfinite(l1));
  CHECK(std::abs(l2 - l1) <= 0.1 * l1);
}
