// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include "railyard/fock.hpp"
#include "railyard/frozen.hpp"
#include "railyard/limitshape.hpp"
#include "railyard/partitions.hpp"
#include "railyard/piecewise.hpp"
#include "railyard/schur_process.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace railyard;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

AsymptoticModel staircase_example() { return AsymptoticModel::single("LRL", "-++", {1.0 / 3, 0.5, 1.0}); }

AsymptoticModel two_segment_example() {
  using L = Letter;
  using S = Sign;
  return AsymptoticModel({0, 0.3, 1}, {{{L::L, S::Minus, 1.0 / 3, -1}, {L::R, S::Plus, 0.5, -1}},
                                        {{L::L, S::Minus, 1, -1}, {L::R, S::Plus, 1.0 / 6, -1}, {L::L, S::Plus, 0.2, -1}}});
}

AsymptoticModel piecewise_model() { return AsymptoticModel::single("LRLL", "-++-", {1.0, 0.5, 1.0 / 3, 0.0}); }
PiecewiseBoundary piecewise_boundary() { return PiecewiseBoundary({6, 5, 2, 1, 0}, {0.25, 0.25, 1.0 / 6, 1.0 / 6, 1.0 / 6}); }

// ---------------------------------------------------------------------------

Outcome partition_function_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> cols(1, 5), coin(0, 1);
  std::uniform_real_distribution<double> weight(0.05, 0.5);
  const auto small = partitions_up_to(4);
  double worst = 0.0;
  int cases = 0, nonempty = 0;

  auto check = [&](const RailYardSpec& s, const Partition& lam, int variant) {
    const double zt = partition_function_transfer(s, {lam, {}}, 40);
    const double zp = partition_function_product(s, lam, variant);
    worst = std::max(worst, std::abs(zt - zp) / zp);
    ++cases;
    nonempty += !lam.empty();
  };

  const auto fig = build(1, 4, "LRRL", "++--", {0.3, 0.2, 0.4, 0.5});
  check(fig, {}, 1);
  const double fig_z = partition_function_transfer(fig, {}, 40);
  o.require(std::abs(fig_z - 1.575448) < 5e-7, "four-column value");

  while (cases < 40) {
    const int n = cols(rng);
    std::string a, b;
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
      a += coin(rng) ? 'L' : 'R';
      b += coin(rng) ? '+' : '-';
      x.push_back(weight(rng));
    }
    const auto s = build(1, n, a, b, x);
    const int lm = static_cast<int>(s.indices_of(Letter::L, Sign::Minus).size());
    const int rm = static_cast<int>(s.indices_of(Letter::R, Sign::Minus).size());
    int variant = 1;
    int max_len = 0;
    if (rm == 0 && lm > 0) {
      max_len = lm;
    } else if (lm == 0 && rm > 0) {
      variant = 2;
    }
    Partition lam = small[std::uniform_int_distribution<std::size_t>(0, small.size() - 1)(rng)];
    if (variant == 1 && lam.length() > max_len) lam = {};
    if (variant == 2 && conjugate(lam).length() > rm) lam = {};
    if (rm > 0 && lm > 0) lam = {};
    check(s, lam, variant);
  }
  const double secs = seconds_since(t0);
  o.require(worst < 1e-8, "relative error");
  o.require(secs < 10.0, "runtime");
  o.detail << cases << " cases (" << nonempty << " with a nonempty boundary), worst relative error " << worst
           << ", four-column Z = " << fig_z << ", " << secs << " s";
  return o;
}

Outcome commutation() {
  Outcome o;
  const auto t0 = Clock::now();
  const int cap = 30, horizon = 4;
  const SlotKind LP{Letter::L, Sign::Plus}, LM{Letter::L, Sign::Minus};
  const SlotKind RP{Letter::R, Sign::Plus}, RM{Letter::R, Sign::Minus};
  const std::pair<SlotKind, SlotKind> combos[] = {{LP, LM}, {LP, RM}, {RP, LM}, {RP, RM}};
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> w(0.0, 0.5);
  const auto below = partitions_up_to(horizon);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double x1 = w(rng), x2 = w(rng);
    for (const auto& [plus, minus] : combos) {
      const double factor = plus.a == minus.a ? 1.0 / (1.0 - x1 * x2) : 1.0 + x1 * x2;
      for (const auto& start : {Partition{}, Partition{2, 1}}) {
        const auto s = FockVector::basis(start, cap);
        const auto lhs = gamma_apply(plus, x1, gamma_apply(minus, x2, s));
        const auto rhs = gamma_apply(minus, x2, gamma_apply(plus, x1, s));
        for (const auto& l : below) worst = std::max(worst, std::abs(lhs[l] - factor * rhs[l]));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst < 1e-12, "coefficient error");
  o.require(secs < 5.0, "runtime");
  o.detail << "4 letter pairs x 10 weight pairs, |lambda| <= " << horizon << " at cap " << cap
           << ", worst coefficient error " << worst << ", " << secs << " s";
  return o;
}

// Chi-square of sampled sequences against the enumerated support; cells with
// expected count below 5 are pooled with the unenumerated remainder.
std::pair<double, int> chi_square(const std::vector<std::vector<Partition>>& draws,
                                  const std::vector<EnumeratedCovering>& support, double Z) {
  std::map<std::vector<Partition>, int> counts;
  for (const auto& d : draws) ++counts[d];
  const double n = static_cast<double>(draws.size());
  double stat = 0.0, pooled_expected = n, pooled_observed = n;
  int cells = 0;
  for (const auto& e : support) {
    const double expected = n * e.weight / Z;
    const auto it = counts.find(e.sequence);
    const double observed = it == counts.end() ? 0.0 : it->second;
    if (expected < 5.0) continue;
    stat += (observed - expected) * (observed - expected) / expected;
    pooled_expected -= expected;
    pooled_observed -= observed;
    ++cells;
  }
  if (pooled_expected >= 5.0) {
    stat += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++cells;
  }
  return {stat, cells - 1};
}

Outcome sampler_exactness() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto fig = build(1, 4, "LRRL", "++--", {0.3, 0.2, 0.4, 0.5});
  const int n = 100000;
  const double Z = partition_function_product(fig, {});
  const auto support = enumerate_coverings(fig, {}, 6);
  const int threads = default_threads();

  std::vector<std::vector<Partition>> transfer;
  transfer.reserve(n);
  for (const auto& c : sample(fig, {}, 31, n, 30, threads)) transfer.push_back(c.partitions());
  const auto shuffle = sample_shuffle(fig, 32, n, threads);

  for (const auto& [name, draws] : {std::pair<std::string, const std::vector<std::vector<Partition>>*>{"transfer", &transfer},
                                    {"shuffle", &shuffle}}) {
    const auto [stat, dof] = chi_square(*draws, support, Z);
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
    // the transfer sampler is the sampling operation under test; the shuffle
    // sampler only feeds the Monte Carlo moments and is reported alongside
    if (name == "transfer") o.require(p > 0.01, name + " sampler p-value");
    o.detail << name << (name == "transfer" ? "" : " (reported, not gated)") << ": chi2 = " << stat << " on " << dof << " dof, p = " << p << "; ";
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime");
  o.detail << support.size() << " enumerated coverings, " << n << " draws each, " << secs << " s";
  return o;
}

Outcome staircase_moments() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto m = staircase_example();
  double worst_z = 0.0, worst_err = 0.0;
  for (double chi : {0.25, 0.5, 0.75}) {
    const auto obs = observe(m, chi);
    const auto em = empirical_moments(m, 80, chi, 3, 10000, 42, default_threads());
    for (int k = 1; k <= 3; ++k) {
      const auto r = moment(m, obs, 1, k);
      const double z = (em.mean[k - 1] - r.value) / em.stderr_[k - 1];
      worst_z = std::max(worst_z, std::abs(z));
      worst_err = std::max(worst_err, r.self_error);
      o.detail << " chi=" << chi << " k=" << k << ": limit " << r.value << " empirical " << em.mean[k - 1] << " ("
               << z << " se);";
    }
  }
  o.require(worst_z < 3.0, "moments within 3 standard errors");
  o.require(worst_err < 1e-9, "quadrature self-error");
  o.detail << " worst |z| " << worst_z << ", worst self-error " << worst_err << ", " << seconds_since(t0) << " s";
  return o;
}

Outcome frozen_boundary_example() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto m = staircase_example();
  const auto p = curve_point_m1(m, 2.0);
  const double err = std::max(std::abs(p.chi - 8.0 / 83), std::abs(p.kappa - 26.0 / 83));
  o.require(err < 1e-9, "point at u = 2");
  const auto t = tangency_report(m);
  o.require(t.count_chi0 == 2 && t.count_chi1 == 1 && t.rank == 3 && t.limits_ok, "tangency");
  const auto w = winding_check(m, 200, 2024);
  o.require(w.passed, "winding");
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime");
  o.detail << "(chi, kappa)(2) = (" << p.chi << ", " << p.kappa << "), error " << err << "; tangency (" << t.count_chi0
           << ", " << t.count_chi1 << ", rank " << t.rank << "); winding failures " << w.failures << "/" << w.lines
           << "; " << secs << " s";
  return o;
}

// Derivative of a truncated series, one order lower.
template <int N>
Jet<N - 1, double> deriv(const Jet<N, double>& f) {
  Jet<N - 1, double> r;
  for (int k = 0; k < N; ++k) r.c[k] = (k + 1) * f.c[k + 1];
  return r;
}
template <int N, int K>
Jet<K, double> truncate(const Jet<N, double>& f) {
  Jet<K, double> r;
  for (int k = 0; k <= K; ++k) r.c[k] = f.c[k];
  return r;
}

// Double dual of the double-root curve of segment pt at parameter u, from
// the affine split F = A + alpha B differentiated as truncated series.
std::pair<double, double> double_dual_series(const AsymptoticModel& m, int pt, int M, double u) {
  const auto af = f_affine(m, pt, M);
  const auto U = Jet<4, double>::variable(u);
  const auto A = af.A(U), B = af.B(U);
  const Jet<3, double> alpha = -deriv(A) / deriv(B);
  const Jet<3, double> kappa = truncate<4, 3>(A) + alpha * truncate<4, 3>(B);
  const double width = m.V(pt) - m.V(pt - 1);
  const Jet<3, double> chi = Jet<3, double>(m.V(pt - 1)) + alpha * Jet<3, double>(width);
  const Jet<2, double> c = truncate<3, 2>(chi), k = truncate<3, 2>(kappa);
  const Jet<2, double> dc = deriv(chi), dk = deriv(kappa);
  const Jet<2, double> cv = dk / (k * dc - c * dk);
  const Jet<2, double> kv = dc / (c * dk - k * dc);
  const auto back = dual_transform(cv.value(), kv.value(), cv.d(1), kv.d(1));
  return {back.chi_v, back.kappa_v};
}

Outcome dual_involution() {
  Outcome o;
  double worst = 0.0;
  int used = 0;
  for (int M : {1, 2}) {
    const auto m = staircase_example();
    const auto c = trace_double_root(m, default_grid(m, M, 4000), M);
    // tangency points have no finite tangent coordinates
    std::vector<CurveSample> usable;
    for (const auto& s : c.samples)
      if (s.chi > 1e-6 && s.chi < 1 - 1e-6) usable.push_back(s);
    int count = 0;
    for (int k = 0; k < 1000 && !usable.empty(); ++k) {
      const auto& s = usable[k * usable.size() / 1000];
      if (M == 1) {
        const auto lib = double_dual(m, s.u);
        worst = std::max(worst, std::abs(lib.first - s.chi) + std::abs(lib.second - s.kappa) / (1 + std::abs(s.kappa)));
      }
      const std::pair<double, double> back = double_dual_series(m, s.branch, M, s.u);
      if (!std::isfinite(back.first) || !std::isfinite(back.second)) {
        worst = std::max(worst, 1.0);
        continue;
      }
      worst = std::max(worst, std::abs(back.first - s.chi) + std::abs(back.second - s.kappa) / (1 + std::abs(s.kappa)));
      ++count;
    }
    used += count;
    o.detail << "M=" << M << ": " << count << " samples; ";
    o.require(count >= 1000, "1000 samples for M=" + std::to_string(M));
  }
  o.require(worst < 1e-8, "double dual");
  o.detail << "worst deviation " << worst << " over " << used << " samples";
  return o;
}

Outcome m2_formulas() {
  Outcome o;
  const auto m = staircase_example();
  double res = 0.0;
  const auto full = trace_double_root(m, default_grid(m, 2, 2000), 2);
  for (const auto& s : full.samples) res = std::max(res, double_root_residual(m, s, 2));
  o.require(res < 1e-8, "double-root residual");

  auto chi_of = [](double u) {
    const double a = 1 / ((3 * u - 1) * (3 * u - 1));
    return (a - 1 / ((3 * u + 1) * (3 * u + 1))) / (a + 2 / (3 * (u + 2) * (u + 2)) + 1 / (3 * (1 - u) * (1 - u)));
  };
  auto kappa_of = [](double u, double chi) {
    return (1 - chi) * u / (3 * u - 1) + chi * (u / (3 * (u + 2)) + u / (3 * (1 - u))) + u / (3 * u + 1);
  };
  // random parameters on which the reference chi lies inside the strip
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-8.0, 8.0);
  std::vector<double> us;
  while (us.size() < 100) {
    const double u = d(rng);
    const double chi = chi_of(u);
    if (chi > 1e-6 && chi < 1 - 1e-6) us.push_back(u);
  }
  std::sort(us.begin(), us.end());
  const auto c = trace_double_root(m, us, 2);
  double worst = 0.0;
  for (const auto& s : c.samples) {
    const double chi = chi_of(s.u);
    const double kappa = kappa_of(s.u, chi);
    worst = std::max(worst, std::abs(s.chi - chi) + std::abs(s.kappa - kappa) / (1 + std::abs(kappa)));
    res = std::max(res, double_root_residual(m, s, 2));
  }
  o.require(c.samples.size() == us.size(), "every parameter traced");
  o.require(worst < 1e-8, "reference formulas");
  o.detail << full.samples.size() << " traced samples, worst residual " << res << "; " << c.samples.size()
           << "/100 random parameters, worst deviation from the reference forms " << worst;
  return o;
}

Outcome coset_formula() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> w(0.3, 2.5);
  double worst = 0.0, worst_gap = 0.0, worst_any = 0.0;
  int cases = 0, separated = 0;
  for (int N = 2; N <= 6; ++N)
    for (int groups = 2; groups <= std::min(3, N); ++groups) {
      std::vector<double> vals(groups);
      for (auto& v : vals) v = w(rng);
      std::vector<double> x(N);
      for (int a = 0; a < N; ++a) x[a] = vals[a * groups / N];
      std::sort(x.begin(), x.end(), std::greater<>());
      std::vector<double> big(N);
      for (int a = 0; a < N; ++a) big[a] = std::pow(1e4, groups - 1 - a * groups / N);
      for (const auto& lam : partitions_up_to(10, N)) {
        const double jt = schur(lam, x);
        const double full = coset_schur(lam, x, {}, CosetMode::Full);
        worst = std::max(worst, std::abs(full - jt) / std::abs(jt));
        ++cases;
        // dominance needs lambda to drop where the weight group changes,
        // the same rule that keeps a level inside one group
        bool drops = true;
        for (int a = 1; a < N; ++a)
          if (big[a] != big[a - 1] && lam[a - 1] == lam[a]) drops = false;
        const double fb = coset_schur(lam, big, {}, CosetMode::Full);
        const double dom = coset_schur(lam, big, {}, CosetMode::Dominant);
        const double gap = std::abs(dom - fb) / std::abs(fb);
        worst_any = std::max(worst_any, gap);
        if (!drops) continue;
        worst_gap = std::max(worst_gap, gap);
        ++separated;
      }
    }
  // the worked example: weights (t, t, 1, 1), lambda = (3, 3, 1)
  const std::vector<double> t4{1e4, 1e4, 1, 1};
  const Partition ex{3, 3, 1};
  const double ex_gap = std::abs(coset_schur(ex, t4, {}, CosetMode::Dominant) / coset_schur(ex, t4, {}, CosetMode::Full) - 1);
  o.require(worst < 1e-10, "full coset sum");
  o.require(worst_gap < 1e-6 && ex_gap < 1e-6, "dominant term");
  o.detail << cases << " (partition, weights) cases; worst relative error of the full sum " << worst
           << "; dominant-term gap at ratio 1e4: " << worst_gap << " over " << separated
           << " separated partitions, " << ex_gap << " on (3,3,1), " << worst_any << " without separation";
  return o;
}

Outcome piecewise_example() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto m = piecewise_model();
  const auto bd = piecewise_boundary();
  const auto g = group_weights(m, bd);

  // reference Phi_1, Phi_2: zeros and poles
  auto same = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  const auto b1 = band_measure(bd, g, 1), b2 = band_measure(bd, g, 2);
  bool phi_ok = b1.bands.size() == 2 && b2.bands.size() == 3;
  if (phi_ok) {
    phi_ok = same(b1.bands[0].beta, 13.5) && same(b1.bands[0].gamma, 14) && same(b1.bands[1].beta, 11) &&
             same(b1.bands[1].gamma, 11.5) && same(b2.bands[0].beta, 14.0 / 3) && same(b2.bands[0].gamma, 5) &&
             same(b2.bands[1].beta, 7.0 / 3) && same(b2.bands[1].gamma, 8.0 / 3) && same(b2.bands[2].beta, 0) &&
             same(b2.bands[2].gamma, 1.0 / 3);
  }
  o.require(phi_ok, "Phi_1, Phi_2");

  // reference J_1, J_2 as functions of Phi
  const std::function<double(double)> reference_j[2] = {
      [](double p) { return p / 4 * (2 / (2 + p) + 3 / (3 - p) - 1 / (p - 1)) - 0.25; },
      [](double p) { return -p / (4 * (p - 1)) - 0.25; }};
  double j_gap[2] = {0, 0};
  for (int i = 1; i <= 2; ++i) {
    const auto J = j_function(m, g, i);
    for (double p : {-5.3, -0.7, 0.4, 1.7, 2.6, 4.2, 9.0}) j_gap[i - 1] = std::max(j_gap[i - 1], std::abs(J(p).real() - reference_j[i - 1](p)));
    std::ostringstream terms;
    terms << (J.constant == 0.0 ? 0.0 : J.constant);
    for (const auto& t : J.terms)
      terms << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << " Phi/(Phi " << (t.pole < 0 ? "+ " : "- ")
            << std::abs(t.pole) << ")";
    o.detail << "J_" << i << " = " << terms.str() << " (max gap to the reference form " << j_gap[i - 1] << "); ";
  }
  o.require(j_gap[0] < 1e-12, "J_1 coefficients");
  o.require(j_gap[1] < 1e-12, "J_2 coefficients");

  ParametricCurve c[2];
  bool bounded = true;
  for (int i = 1; i <= 2; ++i) {
    c[i - 1] = trace_component(m, bd, g, i, component_grid(m, bd, g, i, 2000));
    const auto box = bounding_box(c[i - 1]);
    bounded = bounded && !c[i - 1].samples.empty() && std::isfinite(box.kappa_min) && std::isfinite(box.kappa_max) &&
              box.kappa_max - box.kappa_min < 1e3;
    o.detail << "C_" << i << " kappa in [" << box.kappa_min << ", " << box.kappa_max << "]; ";
  }
  o.require(bounded, "bounded components");
  const double dist = curve_distance(c[0], c[1]);
  o.require(dist > 0, "disjoint components");

  int pairs = 0;
  for (double chi : {0.1, 0.3, 0.6, 0.9}) {
    const auto obs = observe(m, chi);
    for (int k = 0; k < 1000; ++k)
      for (int i = 1; i <= 2; ++i) pairs = std::max(pairs, piecewise_nonreal_pairs(m, bd, g, i, obs, -2 + 20.0 * k / 999));
  }
  o.require(pairs <= 1, "nonreal pairs");
  const double secs = seconds_since(t0);
  o.require(secs < 60, "runtime");
  o.detail << "min distance " << dist << "; max nonreal pairs " << pairs << "; " << secs << " s";
  return o;
}

// ---------------------------------------------------------------------------

// A traced boundary point with the unit normal of the curve there.
struct EdgePoint {
  double chi, kappa, nchi, nkappa, u;
};

struct EdgePick {
  std::vector<EdgePoint> points;
  int skipped = 0;
};

bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy, double dx, double dy) {
  auto side = [](double px, double py, double qx, double qy, double rx, double ry) {
    return (qx - px) * (ry - py) - (qy - py) * (rx - px);
  };
  const double d1 = side(cx, cy, dx, dy, ax, ay), d2 = side(cx, cy, dx, dy, bx, by);
  const double d3 = side(ax, ay, bx, by, cx, cy), d4 = side(ax, ay, bx, by, dx, dy);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Up to `count` evenly spaced points of curves[which] where crossing along the
// normal is well defined: the tangent turns by less than 10 degrees between
// neighbouring samples and the normal segment of half-length `clear` meets no
// other part of any curve (cusps and nearby branches are skipped).
EdgePick pick_edges(const std::vector<ParametricCurve>& curves, std::size_t which, int count, double clear) {
  std::vector<std::vector<CurveSample>> lines;
  for (const auto& c : curves)
    for (auto& piece : c.pieces()) lines.push_back(std::move(piece));
  EdgePick out;
  std::vector<EdgePoint> ok;
  for (const auto& piece : curves[which].pieces())
    for (std::size_t i = 1; i + 1 < piece.size(); ++i) {
      const auto &a = piece[i - 1], &s = piece[i], &b = piece[i + 1];
      if (!(s.chi > 0.05 && s.chi < 0.95 && std::abs(s.kappa) < 50)) continue;
      const double t1c = s.chi - a.chi, t1k = s.kappa - a.kappa, t2c = b.chi - s.chi, t2k = b.kappa - s.kappa;
      const double n1 = std::hypot(t1c, t1k), n2 = std::hypot(t2c, t2k);
      if (n1 == 0 || n2 == 0 || (t1c * t2c + t1k * t2k) / (n1 * n2) < std::cos(10 * M_PI / 180)) {
        ++out.skipped;
        continue;
      }
      const double tc = t1c / n1 + t2c / n2, tk = t1k / n1 + t2k / n2, tn = std::hypot(tc, tk);
      const EdgePoint e{s.chi, s.kappa, -tk / tn, tc / tn, s.u};
      const double ax = e.chi - clear * e.nchi, ay = e.kappa - clear * e.nkappa;
      const double bx = e.chi + clear * e.nchi, by = e.kappa + clear * e.nkappa;
      bool blocked = false;
      for (const auto& line : lines)
        for (std::size_t j = 0; j + 1 < line.size() && !blocked; ++j) {
          const auto &p = line[j], &q = line[j + 1];
          const bool own = (p.u == a.u && q.u == s.u) || (p.u == s.u && q.u == b.u);
          if (!own && segments_cross(ax, ay, bx, by, p.chi, p.kappa, q.chi, q.kappa)) blocked = true;
        }
      if (blocked) {
        ++out.skipped;
        continue;
      }
      ok.push_back(e);
    }
  const std::size_t n = std::min<std::size_t>(count, ok.size());
  for (std::size_t k = 0; k < n; ++k) out.points.push_back(ok[k * ok.size() / n]);
  return out;
}

struct DensityCase {
  std::string name;
  std::function<double(double, double)> rho; // (chi, kappa)
  std::function<double(double)> mass;        // total of rho at chi
  std::function<std::pair<double, double>(double)> range;
  std::vector<double> chis;
  EdgePick edges;
};

Outcome density_sanity() {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<DensityCase> cases;

  auto staircase_range = [](const AsymptoticModel& m, int M) {
    return [m, M](double chi) {
      const auto obs = observe(m, chi);
      const double mass = limit_mass(m, obs, M);
      const double mean = moment(m, obs, M, 1).value / mass;
      const double var = moment(m, obs, M, 2).value / mass - mean * mean;
      const double w = 8 * std::sqrt(std::max(var, 0.0)) + 2 * mass;
      return std::make_pair(mean - w, mean + w);
    };
  };
  const double offset = 1e-3;
  auto pick = [offset](const std::vector<ParametricCurve>& curves, std::size_t which, int count) {
    return pick_edges(curves, which, count, 5 * offset);
  };


  {
    const auto m = staircase_example();
    cases.push_back({"staircase M=1", [m](double chi, double k) { return density(m, observe(m, chi), 1, k); },
                     [m](double chi) { return limit_mass(m, observe(m, chi), 1); }, staircase_range(m, 1), {0.25, 0.5, 0.75}, pick({trace_m1(m, default_grid(m, 1, 400))}, 0, 20)});
    cases.push_back({"staircase M=2", [m](double chi, double k) { return density(m, observe(m, chi), 2, k); },
                     [m](double chi) { return limit_mass(m, observe(m, chi), 2); }, staircase_range(m, 2), {0.25, 0.5, 0.75}, pick({trace_double_root(m, default_grid(m, 2, 400), 2)}, 0, 20)});
  }
  {
    const auto m = two_segment_example();
    cases.push_back({"two segments", [m](double chi, double k) { return density(m, observe(m, chi), 1, k); },
                     [m](double chi) { return limit_mass(m, observe(m, chi), 1); }, staircase_range(m, 1), {0.15, 0.5, 0.85}, pick({trace_double_root(m, default_grid(m, 1, 400), 1)}, 0, 20)});
  }
  {
    const auto m = piecewise_model();
    const auto bd = piecewise_boundary();
    const auto g = group_weights(m, bd);
    std::vector<ParametricCurve> comps;
    for (int i = 1; i <= 2; ++i) comps.push_back(trace_component(m, bd, g, i, component_grid(m, bd, g, i, 400)));
    EdgePick bnd;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const auto s = pick(comps, i, 10);
      bnd.points.insert(bnd.points.end(), s.points.begin(), s.points.end());
      bnd.skipped += s.skipped;
    }
    cases.push_back({"piecewise", [m, bd, g](double chi, double k) { return density_piecewise(m, bd, g, observe(m, chi), k); },
                     [m, g](double chi) { return piecewise_mass(m, g, observe(m, chi)); },
                     [](double) { return std::make_pair(-2.0, 16.0); }, {0.3, 0.6}, bnd});
  }

  for (const auto& dc : cases) {
    double lo_val = 1.0, hi_val = 0.0, worst_int = 0.0, worst_edge = 0.0;
    for (double chi : dc.chis) {
      const auto [lo, hi] = dc.range(chi);
      for (int i = 0; i <= 400; ++i) {
        const double v = dc.rho(chi, lo + (hi - lo) * i / 400);
        lo_val = std::min(lo_val, v);
        hi_val = std::max(hi_val, v);
      }
      const auto total = integrate_on_support([&](double k) { return dc.rho(chi, k); }, lo, hi);
      // rho counts particles, so it is normalized by the column mass
      worst_int = std::max(worst_int, std::abs(total.value / dc.mass(chi) - 1.0));
      if (std::getenv("RAILYARD_ACCEPTANCE_TRACE"))
        std::fprintf(stderr, "%s chi=%.3f range [%.4f, %.4f] integral %.9f mass %.9f\n", dc.name.c_str(), chi, lo, hi,
                     total.value, dc.mass(chi));
    }
    // one side of each boundary point is frozen: density 0 or 1
    for (const auto& e : dc.edges.points) {
      auto to_frozen = [](double v) { return std::min(std::abs(v), std::abs(1 - v)); };
      const double minus = dc.rho(e.chi - offset * e.nchi, e.kappa - offset * e.nkappa);
      const double plus = dc.rho(e.chi + offset * e.nchi, e.kappa + offset * e.nkappa);
      const double d = std::min(to_frozen(minus), to_frozen(plus));
      worst_edge = std::max(worst_edge, d);
      if (std::getenv("RAILYARD_ACCEPTANCE_TRACE") && d >= 0.02)
        std::fprintf(stderr, "%s chi=%.6f kappa=%.6f u=%.6f n=(%.3f,%.3f) minus=%.4f plus=%.4f\n", dc.name.c_str(), e.chi,
                     e.kappa, e.u, e.nchi, e.nkappa, minus, plus);
    }
    o.require(lo_val >= 0.0 && hi_val <= 1.0, dc.name + " range");
    o.require(worst_int < 1e-3, dc.name + " normalization");
    o.require(worst_edge < 0.02, dc.name + " frozen side");
    o.detail << dc.name << ": values in [" << lo_val << ", " << hi_val << "], |integral - 1| <= " << worst_int
             << ", frozen-side distance <= " << worst_edge << " at " << dc.edges.points.size() << " boundary points (" << dc.edges.skipped
             << " near cusps or other branches skipped); ";
  }
  o.detail << seconds_since(t0) << " s";
  return o;
}

} // namespace

// Optional arguments pick criteria by number; the default runs all of them.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"partition function: transfer vs product", partition_function_oracle},
      {"commutation relations", commutation},
      {"sampler exactness", sampler_exactness},
      {"staircase moments vs Monte Carlo", staircase_moments},
      {"frozen boundary of the staircase example", frozen_boundary_example},
      {"dual-curve involution", dual_involution},
      {"M = 2 double-root curve", m2_formulas},
      {"coset Schur formula", coset_formula},
      {"piecewise frozen boundary", piecewise_example},
      {"density sanity", density_sanity}};
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    if (!only.empty() && std::find(only.begin(), only.end(), index) == only.end()) continue;
    Outcome r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << "exception: " << e.what();
    }
    failed += !r.pass;
    std::printf("criterion %d: %s  %s | %s\n", index, r.pass ? "PASS" : "FAIL", name, r.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}
