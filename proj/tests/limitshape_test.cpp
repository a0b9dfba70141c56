#include "railyard/limitshape.hpp"

#include <doctest.h>

#include <cmath>

using namespace railyard;

namespace {

AsymptoticModel staircase_example() { return AsymptoticModel::single("LRL", "-++", {1.0 / 3, 0.5, 1.0}); }

} // namespace

TEST_SUITE("limitshape") {

TEST_CASE("observation points") {
  const AsymptoticModel m({0, 0.3, 1}, {{{Letter::L, Sign::Minus, 1.0 / 3, -1}, {Letter::R, Sign::Plus, 0.5, -1}},
                                        {{Letter::L, Sign::Minus, 1, -1}, {Letter::R, Sign::Plus, 1.0 / 6, -1}}});
  const auto o = observe(m, 0.65);
  CHECK(o.pt == 2);
  CHECK(o.alpha == doctest::Approx(0.5));
  CHECK(o.chi(m) == doctest::Approx(0.65));
  CHECK(observe(m, 0.1).pt == 1);
  CHECK_THROWS_AS(observe(m, 1.5), InvalidInput);
  CHECK(m.segment_weight(1) == doctest::Approx(0.3));
}

TEST_CASE("W is a single pole term for the staircase example") {
  const auto m = staircase_example();
  for (double chi : {0.2, 0.7}) {
    const auto o = observe(m, chi);
    for (cplx u : {cplx(2.0), cplx(0.1, 0.7), cplx(-3.0, 1.0)}) {
      const cplx expected = (1.0 - chi) / (3.0 * (u - 1.0 / 3));
      CHECK(std::abs(w_eval(m, o, u) - expected) < 1e-14);
    }
  }
  CHECK(std::abs(w_eval(m, observe(m, 1.0), cplx(2.0))) < 1e-15);
}

TEST_CASE("F touches kappa with a double root on the frozen boundary") {
  const auto m = staircase_example();
  // closed-form point of the boundary at u = 2
  const double chi = 0.0963855421686747, kappa = 0.3132530120481928;
  const auto o = observe(m, chi);
  CHECK(std::abs(f_eval(m, o, 1, 2.0) - kappa) < 1e-9);
  const double h = 1e-5;
  const double slope = std::real(f_eval(m, o, 1, 2.0 + h) - f_eval(m, o, 1, 2.0 - h)) / (2 * h);
  CHECK(std::abs(slope) < 1e-6);
  // the pole-sum form evaluates to the same function
  const auto F = f_function(m, o, 1);
  for (cplx z : {cplx(2.0), cplx(0.4, 0.3), cplx(-1.5, 2.0)}) CHECK(std::abs(F(z) - f_eval(m, o, 1, z)) < 1e-12);
  // affine split in alpha
  const auto af = f_affine(m, 1, 1);
  CHECK(std::abs(af.A(cplx(2.0)) + o.alpha * af.B(cplx(2.0)) - F(cplx(2.0))) < 1e-12);
}

TEST_CASE("residue of F at an (L,-) pole") {
  const auto m = staircase_example();
  const auto o = observe(m, 0.4);
  // residue of z * W(z) at 1/3 is (1 - alpha) * (1/3) * (1/3)
  const double z0 = 1.0 / 3, eps = 1e-7;
  const cplx r = eps * f_eval(m, o, 1, z0 + eps);
  CHECK(std::real(r) == doctest::Approx((1 - 0.4) / 9.0).epsilon(1e-5));
  CHECK(contour_poles(m, o) == std::vector<double>{1.0 / 3});
  // (L,-) slots right of the column per slot: (1 - chi) / 3
  CHECK(limit_mass(m, o, 1) == doctest::Approx(0.2));
}

TEST_CASE("moments") {
  // An empty column: the counting measure of the empty partition.
  const auto single = AsymptoticModel::single("L", "-", {0.5});
  const auto r = moment(single, observe(single, 0.0), 1, 1);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));

  const auto m = staircase_example();
  for (double chi : {0.25, 0.5, 0.75}) {
    const auto o = observe(m, chi);
    CHECK(moment(m, o, 1, 0).value == doctest::Approx(limit_mass(m, o, 1)).epsilon(1e-10));
    for (int k = 1; k <= 3; ++k) CHECK(moment(m, o, 1, k).self_error < 1e-9);
  }
}

TEST_CASE("density is bounded and reproduces mass and first moment") {
  const auto m = staircase_example();
  for (int M : {1, 2})
    for (double chi : {0.25, 0.5, 0.75}) {
      const auto o = observe(m, chi);
      const double mass = limit_mass(m, o, M);
      const double m1 = moment(m, o, M, 1).value;
      const double mean = m1 / mass;
      const double lo = mean - 3.0, hi = mean + 3.0;
      for (int i = 0; i <= 100; ++i) {
        const double d = density(m, o, M, lo + (hi - lo) * i / 100);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
      }
      CHECK(density(m, o, M, lo) < 1e-12);
      if (chi != 0.5) continue;
      auto rho = [&](double k) { return density(m, o, M, k); };
      const auto total = integrate_on_support(rho, lo, hi, 200);
      CHECK(total.value == doctest::Approx(mass).epsilon(1e-5));
      const auto first = integrate_on_support([&](double k) { return k * rho(k); }, lo, hi, 200);
      CHECK(first.value == doctest::Approx(m1).epsilon(1e-5));
    }
}

TEST_CASE("frozen stretch without a conjugate pair stays saturated") {
  // The real roots move smoothly across [0.001, 0.1]; a root swap during
  // tracking used to punch a hole of zeros into the saturated stretch.
  using L = Letter;
  using S = Sign;
  const AsymptoticModel m({0, 0.3, 1}, {{{L::L, S::Minus, 1.0 / 3, -1}, {L::R, S::Plus, 0.5, -1}},
                                        {{L::L, S::Minus, 1, -1}, {L::R, S::Plus, 1.0 / 6, -1}, {L::L, S::Plus, 0.2, -1}}});
  const auto o = observe(m, 0.15);
  for (int i = 0; i <= 50; ++i) {
    const double k = 0.001 + 0.099 * i / 50;
    CHECK(nonreal_pairs(m, o, 1, k) == 0);
    CHECK(density(m, o, 1, k) == doctest::Approx(1.0));
  }
}

TEST_CASE("at most one conjugate pair") {
  const auto m = staircase_example();
  for (double chi : {0.25, 0.5, 0.75}) {
    const auto o = observe(m, chi);
    int worst = 0;
    for (int i = 0; i <= 200; ++i) worst = std::max(worst, nonreal_pairs(m, o, 1, -2.0 + 5.0 * i / 200));
    CHECK(worst <= 1);
  }
}

TEST_CASE("support integration on a known density") {
  // semicircle of radius 1 scaled to unit mass, plus a separate block
  auto semi = [](double x) { return std::abs(x) < 1 ? 2.0 / M_PI * std::sqrt(1 - x * x) : 0.0; };
  const auto r = integrate_on_support(semi, -3, 3);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(r.intervals.size() == 1);
  CHECK(r.intervals[0].first == doctest::Approx(-1.0).epsilon(1e-6));
  auto two = [](double x) { return (x > 0 && x < 1) || (x > 2 && x < 2.5) ? 1.0 : 0.0; };
  const auto q = integrate_on_support(two, -1, 4);
  CHECK(q.intervals.size() == 2);
  CHECK(q.value == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("realized graphs follow the pattern") {
  const auto m = staircase_example();
  const auto s = realize(m, 12);
  CHECK(s.l() == 0);
  CHECK(s.r() == 12);
  CHECK(s.letters_string() == "LRLLRLLRLLRLL");
  CHECK(s.signs_string() == "-++-++-++-++-");
  CHECK(realized_column(m, 12, 0.5) == 6);
  const auto a = empirical_moments(m, 12, 0.5, 2, 50, 9, 1);
  const auto b = empirical_moments(m, 12, 0.5, 2, 50, 9, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.samples == 50);
}

} // TEST_SUITE
