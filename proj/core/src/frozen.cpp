#include "railyard/frozen.hpp"

#include "railyard/error.hpp"
#include "railyard/limitshape.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace railyard {

namespace {

void require_single(const AsymptoticModel& model, const char* what) {
  if (model.m() != 1) throw InvalidInput(std::string(what) + ": needs a single-segment model");
}

bool near_any(double u, const std::vector<double>& pts, double tol) {
  return std::any_of(pts.begin(), pts.end(), [&](double p) { return std::abs(u - p) <= tol * std::max(1.0, std::abs(p)); });
}

// True when some singularity lies strictly between a and b.
bool separated(double a, double b, const std::vector<double>& sing) {
  if (a > b) std::swap(a, b);
  return std::any_of(sing.begin(), sing.end(), [&](double s) { return s > a && s < b; });
}

std::vector<double> u_poles(const AsymptoticModel& model) {
  std::vector<double> ps;
  for (const auto& s : model.segment(1)) {
    if (s.x <= 0.0) continue;
    if (s.a == Letter::R && s.b == Sign::Plus) ps.push_back(-1.0 / s.x);
    if (s.a == Letter::L && s.b == Sign::Plus) ps.push_back(1.0 / s.x);
  }
  return distinct_sorted(ps);
}

std::vector<double> v_poles(const AsymptoticModel& model) {
  std::vector<double> ps;
  for (const auto& s : model.segment(1))
    if (s.x > 0.0 && s.a == Letter::L && s.b == Sign::Minus) ps.push_back(s.x);
  return distinct_sorted(ps);
}

} // namespace

std::vector<std::vector<CurveSample>> ParametricCurve::pieces() const {
  std::vector<std::vector<CurveSample>> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (out.empty() || (b < breaks.size() && breaks[b] == i)) {
      out.emplace_back();
      while (b < breaks.size() && breaks[b] <= i) ++b;
    }
    out.back().push_back(samples[i]);
  }
  return out;
}

UV uv_functions(const AsymptoticModel& model) {
  require_single(model, "uv_functions");
  UV f;
  const double n = model.n(1);
  for (const auto& s : model.segment(1)) {
    if (s.a == Letter::L && s.b == Sign::Minus) {
      if (s.x > 0.0)
        f.V.add(1.0 / n, s.x);
      else
        f.V.constant += 1.0 / n;
    } else if (s.x > 0.0 && s.b == Sign::Plus) {
      if (s.a == Letter::R)
        f.U.add(s.zeta, -1.0 / s.x);
      else
        f.U.add(-s.zeta, 1.0 / s.x);
    }
  }
  f.U = f.U.merged();
  f.V = f.V.merged();
  return f;
}

std::pair<double, double> uv_values(const AsymptoticModel& model, double u) {
  const UV f = uv_functions(model);
  auto ps = f.U.poles();
  const auto pv = f.V.poles();
  ps.insert(ps.end(), pv.begin(), pv.end());
  if (near_any(u, ps, 1e-14)) throw InvalidInput("uv_values: u is singular");
  return {f.U(u).real(), f.V(u).real()};
}

namespace {

struct M1Point {
  double chi, kappa, dchi, dkappa;
  bool ok;
};

M1Point m1_point(const UV& f, double u) {
  const double U = f.U(u).real(), V = f.V(u).real();
  const double U1 = f.U.derivative(u, 1).real(), V1 = f.V.derivative(u, 1).real();
  const double U2 = f.U.derivative(u, 2).real(), V2 = f.V.derivative(u, 2).real();
  const double den = V1 - U1;
  if (!std::isfinite(U) || !std::isfinite(V) || den == 0.0 || !std::isfinite(den)) return {0, 0, 0, 0, false};
  const double chi = V1 / den;
  const double kappa = chi * U + (1.0 - chi) * V;
  const double dchi = (V1 * U2 - V2 * U1) / (den * den);
  // the double-root condition kills the other part of kappa'
  const double dkappa = dchi * (U - V);
  return {chi, kappa, dchi, dkappa, std::isfinite(chi) && std::isfinite(kappa)};
}

} // namespace

CurveSample curve_point_m1(const AsymptoticModel& model, double u) {
  const UV f = uv_functions(model);
  auto ps = f.U.poles();
  const auto pv = f.V.poles();
  ps.insert(ps.end(), pv.begin(), pv.end());
  if (near_any(u, ps, 1e-14)) throw InvalidInput("curve_point_m1: u is singular");
  const auto p = m1_point(f, u);
  if (!p.ok) throw NumericalFailure("curve_point_m1: degenerate derivative");
  return {u, p.chi, p.kappa, 1};
}

ParametricCurve trace_m1(const AsymptoticModel& model, const std::vector<double>& u_grid) {
  const UV f = uv_functions(model);
  auto sing = f.U.poles();
  const auto pv = f.V.poles();
  sing.insert(sing.end(), pv.begin(), pv.end());
  sing = distinct_sorted(sing);
  ParametricCurve c;
  double last = 0.0;
  bool have = false;
  for (double u : u_grid) {
    if (near_any(u, sing, 1e-14)) {
      have = false;
      continue;
    }
    const auto p = m1_point(f, u);
    if (!p.ok) {
      have = false;
      continue;
    }
    if (!have || separated(last, u, sing)) c.breaks.push_back(c.samples.size());
    c.samples.push_back({u, p.chi, p.kappa, 1});
    last = u;
    have = true;
  }
  if (c.samples.empty()) throw InvalidInput("trace_m1: no usable grid point");
  return c;
}

DualPoint dual(const AsymptoticModel& model, double u) {
  const auto [U, V] = uv_values(model, u);
  if (V == 0.0) throw InvalidInput("dual: V(u) = 0");
  return {(U - V) / V, -1.0 / V};
}

DualPoint dual_transform(double c, double k, double dc, double dk) {
  const double den = k * dc - c * dk;
  if (den == 0.0) throw NumericalFailure("dual_transform: tangent line through the origin");
  return {dk / den, -dc / den};
}

std::pair<double, double> double_dual(const AsymptoticModel& model, double u) {
  const UV f = uv_functions(model);
  const double U = f.U(u).real(), V = f.V(u).real();
  const double U1 = f.U.derivative(u, 1).real(), V1 = f.V.derivative(u, 1).real();
  if (V == 0.0) throw InvalidInput("double_dual: V(u) = 0");
  const double cv = U / V - 1.0, kv = -1.0 / V;
  const double dcv = (U1 * V - U * V1) / (V * V), dkv = V1 / (V * V);
  const DualPoint p = dual_transform(cv, kv, dcv, dkv);
  return {p.chi_v, p.kappa_v};
}

std::vector<double> curve_singularities(const AsymptoticModel& model, int M) {
  std::vector<double> s;
  for (int p = 1; p <= model.m(); ++p) {
    const AffineF f = f_affine(model, p, M);
    for (double x : f.A.poles()) s.push_back(x);
    for (double x : f.B.poles()) s.push_back(x);
  }
  return distinct_sorted(s);
}

std::vector<double> default_grid(const AsymptoticModel& model, int M, int per_interval) {
  return refined_grid(curve_singularities(model, M), per_interval);
}

ParametricCurve trace_double_root(const AsymptoticModel& model, const std::vector<double>& u_grid, int M) {
  const auto sing = curve_singularities(model, M);
  ParametricCurve c;
  for (int pt = 1; pt <= model.m(); ++pt) {
    const AffineF f = f_affine(model, pt, M);
    const double v0 = model.V(pt - 1), dv = model.V(pt) - model.V(pt - 1);
    double last = 0.0;
    bool have = false;
    for (double u : u_grid) {
      if (near_any(u, sing, 1e-14)) {
        have = false;
        continue;
      }
      const double A = f.A(u).real(), B = f.B(u).real();
      const double A1 = f.A.derivative(u, 1).real(), B1 = f.B.derivative(u, 1).real();
      double alpha = -A1 / B1;
      if (!std::isfinite(alpha) || alpha < -1e-9 || alpha > 1.0 + 1e-9) {
        have = false;
        continue;
      }
      alpha = std::clamp(alpha, 0.0, 1.0);
      // snapping must not spoil the double root (B' is huge near its poles)
      if (std::abs(A1 + alpha * B1) > 1e-9) {
        have = false;
        continue;
      }
      if (!have || separated(last, u, sing)) c.breaks.push_back(c.samples.size());
      c.samples.push_back({u, v0 + alpha * dv, A + alpha * B, pt, alpha});
      last = u;
      have = true;
    }
  }
  if (c.samples.empty()) throw InvalidInput("trace_double_root: no admissible alpha on the grid");
  return c;
}

double double_root_residual(const AsymptoticModel& model, const CurveSample& s, int M) {
  const int pt = s.branch;
  const double dv = model.V(pt) - model.V(pt - 1);
  const double alpha = std::isfinite(s.alpha) ? s.alpha : std::clamp((s.chi - model.V(pt - 1)) / dv, 0.0, 1.0);
  // unmerged: near a pole of B the tiny alpha B term still matters for F'
  const AffineF f = f_affine(model, pt, M);
  const double a0 = f.A(s.u).real(), b0 = alpha * f.B(s.u).real();
  const double a1 = f.A.derivative(s.u, 1).real(), b1 = alpha * f.B.derivative(s.u, 1).real();
  // scaled by the size of the terms once they exceed 1, so rounding in chi
  // near a pole is not mistaken for a violated equation
  const double r0 = std::abs(a0 + b0 - s.kappa) / std::max({1.0, std::abs(a0), std::abs(b0)});
  const double r1 = std::abs(a1 + b1) / std::max({1.0, std::abs(a1), std::abs(b1)});
  return std::max(r0, r1);
}

TangencyReport tangency_report(const AsymptoticModel& model) {
  require_single(model, "tangency_report");
  const auto pu = u_poles(model), pv = v_poles(model);
  TangencyReport r;
  r.count_chi0 = static_cast<int>(pu.size());
  r.count_chi1 = static_cast<int>(pv.size());
  std::vector<double> all = pu;
  all.insert(all.end(), pv.begin(), pv.end());
  r.rank = static_cast<int>(distinct_sorted(all).size());
  const UV f = uv_functions(model);
  const double h = 1e-6;
  for (double p : pu)
    for (double side : {-1.0, 1.0}) {
      const auto q = m1_point(f, p + side * h);
      r.chi0_limit = std::max(r.chi0_limit, q.ok ? std::abs(q.chi) : 1.0);
    }
  for (double p : pv)
    for (double side : {-1.0, 1.0}) {
      const auto q = m1_point(f, p + side * h);
      r.chi1_limit = std::max(r.chi1_limit, q.ok ? std::abs(1.0 - q.chi) : 1.0);
    }
  r.limits_ok = r.chi0_limit < 1e-6 && r.chi1_limit < 1e-6;
  return r;
}

namespace {

// Roots of g(u) = c on the real line, counted by sign changes of g - c on
// a refined grid inside each interval cut by the singular points.
int count_real_solutions(const std::function<double(double)>& g, double c, const std::vector<double>& sing) {
  const auto grid = refined_grid(sing, 400, 1e-9);
  int n = 0;
  double prev = 0.0;
  double prev_u = 0.0;
  bool have = false;
  for (double u : grid) {
    if (near_any(u, sing, 1e-14)) {
      have = false;
      continue;
    }
    const double v = g(u) - c;
    if (have && !separated(prev_u, u, sing) && ((prev < 0.0) != (v < 0.0))) ++n;
    prev = v;
    prev_u = u;
    have = true;
  }
  return n;
}

} // namespace

WindingReport winding_check(const AsymptoticModel& model, int line_samples, std::uint64_t seed) {
  require_single(model, "winding_check");
  const UV f = uv_functions(model);
  auto sing = u_poles(model);
  const auto pv = v_poles(model);
  sing.insert(sing.end(), pv.begin(), pv.end());
  sing = distinct_sorted(sing);
  WindingReport r;
  r.rank = static_cast<int>(sing.size());
  r.lines = line_samples;
  r.min_finite = std::numeric_limits<int>::max();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dd(-0.99, 4.0), dc(-5.0, 5.0);
  // V(inf) and U(inf)
  double v_inf = f.V.constant, u_inf = f.U.constant;
  for (const auto& t : f.V.terms) v_inf += t.coef;
  for (const auto& t : f.U.terms) u_inf += t.coef;
  for (int i = 0; i < line_samples; ++i) {
    const double d = dd(rng), c = dc(rng);
    auto g = [&](double u) { return (d + 1.0) * f.V(u).real() - f.U(u).real(); };
    const int n = count_real_solutions(g, c, sing);
    r.min_finite = std::min(r.min_finite, n);
    if (n < r.rank - 1) ++r.failures;
  }
  if (line_samples == 0) r.min_finite = 0;
  {
    const double d = 0.5;
    const double xi = (d + 1.0) * v_inf - u_inf;
    auto g = [&](double u) { return (d + 1.0) * f.V(u).real() - f.U(u).real(); };
    r.at_xi_inf = count_real_solutions(g, xi, sing);
  }
  r.passed = r.failures == 0 && r.at_xi_inf == std::max(0, r.rank - 1);
  return r;
}

} // namespace railyard
