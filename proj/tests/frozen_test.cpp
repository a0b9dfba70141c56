#include "railyard/frozen.hpp"
#include "railyard/limitshape.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace railyard;

namespace {

AsymptoticModel staircase_example() { return AsymptoticModel::single("LRL", "-++", {1.0 / 3, 0.5, 1.0}); }

AsymptoticModel two_segment_example() {
  using L = Letter;
  using S = Sign;
  return AsymptoticModel({0, 0.3, 1}, {{{L::L, S::Minus, 1.0 / 3, -1}, {L::R, S::Plus, 0.5, -1}},
                                        {{L::L, S::Minus, 1, -1}, {L::R, S::Plus, 1.0 / 6, -1}, {L::L, S::Plus, 0.2, -1}}});
}

// Hand-written U, V of the staircase example and their derivatives.
double U(double u) { return u / (3 * (u + 2)) - u / (3 * (u - 1)); }
double V(double u) { return u / (3 * (u - 1.0 / 3)); }
double dU(double u) { return 2 / (3 * (u + 2) * (u + 2)) + 1 / (3 * (u - 1) * (u - 1)); }
double dV(double u) { return -1.0 / 9 / ((u - 1.0 / 3) * (u - 1.0 / 3)); }

} // namespace

TEST_SUITE("frozenboundary") {

TEST_CASE("U and V of the staircase example") {
  const auto m = staircase_example();
  const auto [u2, v2] = uv_values(m, 2.0);
  CHECK(u2 == doctest::Approx(-0.5));
  CHECK(v2 == doctest::Approx(0.4));
  CHECK_THROWS_AS(uv_values(m, 1.0), InvalidInput);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int i = 0; i < 50; ++i) {
    const double u = d(rng);
    const auto [a, b] = uv_values(m, u);
    CHECK(a == doctest::Approx(U(u)));
    CHECK(b == doctest::Approx(V(u)));
  }
}

TEST_CASE("closed-form boundary point") {
  const auto m = staircase_example();
  const auto p = curve_point_m1(m, 2.0);
  CHECK(p.chi == doctest::Approx(8.0 / 83).epsilon(1e-12));
  CHECK(p.kappa == doctest::Approx(26.0 / 83).epsilon(1e-12));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-4, 4);
  for (int i = 0; i < 50; ++i) {
    const double u = d(rng);
    const double chi = dV(u) / (dV(u) - dU(u));
    const auto q = curve_point_m1(m, u);
    CHECK(q.chi == doctest::Approx(chi).epsilon(1e-10));
    CHECK(q.kappa == doctest::Approx(chi * U(u) + (1 - chi) * V(u)).epsilon(1e-10));
  }
}

TEST_CASE("traced boundary lies in the strip and touches its edges") {
  const auto m = staircase_example();
  const auto c = trace_m1(m, default_grid(m, 1, 400));
  REQUIRE(!c.samples.empty());
  for (const auto& s : c.samples) {
    CHECK(s.chi >= -1e-12);
    CHECK(s.chi <= 1 + 1e-12);
  }
  const auto t = tangency_report(m);
  CHECK(t.count_chi0 == 2);
  CHECK(t.count_chi1 == 1);
  CHECK(t.rank == 3);
  CHECK(t.limits_ok);
}

TEST_CASE("closed form and double-root tracing agree") {
  const auto m = staircase_example();
  const auto grid = default_grid(m, 1, 400);
  const auto a = trace_m1(m, grid);
  const auto b = trace_double_root(m, grid, 1);
  REQUIRE(a.samples.size() == b.samples.size());
  double worst = 0.0, res = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    worst = std::max(worst, std::abs(a.samples[i].chi - b.samples[i].chi) +
                                std::abs(a.samples[i].kappa - b.samples[i].kappa) / (1 + std::abs(a.samples[i].kappa)));
    res = std::max(res, double_root_residual(m, b.samples[i], 1));
  }
  CHECK(worst < 1e-8);
  CHECK(res < 1e-8);
}

TEST_CASE("dual curve") {
  const auto m = staircase_example();
  for (double u : {-3.0, -0.5, 0.7, 2.0, 4.5}) {
    const auto [a, b] = uv_values(m, u);
    const auto dp = dual(m, u);
    CHECK(dp.chi_v == doctest::Approx((a - b) / b));
    CHECK(dp.kappa_v == doctest::Approx(-1 / b));
    const auto [chi, kappa] = double_dual(m, u);
    const auto p = curve_point_m1(m, u);
    CHECK(chi == doctest::Approx(p.chi).epsilon(1e-8));
    CHECK(kappa == doctest::Approx(p.kappa).epsilon(1e-8));
  }
  // tangent line kappa = 2 chi + 1 at (0, 1)
  const auto d = dual_transform(0.0, 1.0, 1.0, 2.0);
  CHECK(d.chi_v == doctest::Approx(2.0));
  CHECK(d.kappa_v == doctest::Approx(-1.0));
}

TEST_CASE("winding") {
  const auto w = winding_check(staircase_example(), 60, 4);
  CHECK(w.passed);
  CHECK(w.failures == 0);
  CHECK(w.rank == 3);
}

TEST_CASE("two-segment model matches the closed-form reference") {
  const auto m = two_segment_example();
  const auto c = trace_double_root(m, default_grid(m, 1, 200), 1);
  int n1 = 0, n2 = 0;
  double e1 = 0, e2 = 0, res = 0;
  for (const auto& s : c.samples) {
    const double u = s.u;
    res = std::max(res, double_root_residual(m, s, 1));
    if (s.branch == 1) {
      const double chi = (7 / (30 * (u - 1) * (u - 1)) + 9 / (20 * (3 * u - 1) * (3 * u - 1))) /
                         (3 / (2 * (3 * u - 1) * (3 * u - 1)) + 1 / ((2 + u) * (2 + u)));
      const double ka = 7.0 / 30 * u / (u - 1) + 9.0 / 20 * u / (3 * u - 1) + (u / (2 * (2 + u)) - 3 * u / (2 * (3 * u - 1))) * chi;
      e1 = std::max(e1, std::abs(chi - s.chi) / (1 + std::abs(chi)) + std::abs(ka - s.kappa) / (1 + std::abs(ka)));
      ++n1;
    } else {
      const double chi = (1 / (3 * (u - 1) * (u - 1)) - 3 / (10 * (2 + u) * (2 + u)) + 3 / (5 * (6 + u) * (6 + u)) +
                          1 / (2 * (5 - u) * (5 - u))) /
                         (1 / (3 * (u - 1) * (u - 1)) + 2 / ((6 + u) * (6 + u)) + 5 / (3 * (5 - u) * (5 - u)));
      const double ka = u / (3 * (u - 1)) + 3.0 / 20 * u / (2 + u) - u / (10 * (u + 6)) - u / (10 * (5 - u)) +
                        (u / (3 * (6 + u)) + u / (3 * (5 - u)) - u / (3 * (u - 1))) * chi;
      e2 = std::max(e2, std::abs(chi - s.chi) / (1 + std::abs(chi)) + std::abs(ka - s.kappa) / (1 + std::abs(ka)));
      ++n2;
    }
  }
  CHECK(n1 > 0);
  CHECK(n2 > 0);
  CHECK(e1 < 1e-8);
  CHECK(e2 < 1e-8);
  CHECK(res < 1e-8);
}

TEST_CASE("M = 2 staircase matches the closed-form reference") {
  const auto m = staircase_example();
  const auto c = trace_double_root(m, default_grid(m, 2, 200), 2);
  REQUIRE(c.samples.size() > 100);
  double e = 0, res = 0;
  for (const auto& s : c.samples) {
    const double u = s.u;
    const double a = 1 / ((3 * u - 1) * (3 * u - 1));
    const double chi = (a - 1 / ((3 * u + 1) * (3 * u + 1))) / (a + 2 / (3 * (u + 2) * (u + 2)) + 1 / (3 * (1 - u) * (1 - u)));
    const double ka = (1 - chi) * u / (3 * u - 1) + chi * (u / (3 * (u + 2)) + u / (3 * (1 - u))) + u / (3 * u + 1);
    e = std::max(e, std::abs(chi - s.chi) + std::abs(ka - s.kappa) / (1 + std::abs(ka)));
    res = std::max(res, double_root_residual(m, s, 2));
  }
  CHECK(e < 1e-8);
  CHECK(res < 1e-8);
}

TEST_CASE("curve pieces split at singular parameters") {
  const auto m = staircase_example();
  const auto sing = curve_singularities(m, 1);
  CHECK(sing == std::vector<double>{-2.0, 1.0 / 3, 1.0});
  const auto c = trace_m1(m, default_grid(m, 1, 100));
  CHECK(c.pieces().size() >= 2);
  std::size_t total = 0;
  for (const auto& p : c.pieces()) total += p.size();
  CHECK(total == c.samples.size());
}

} // TEST_SUITE
