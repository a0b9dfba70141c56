#include "railyard/piecewise.hpp"

#include "railyard/error.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace railyard {

// ---- boundary and groups -------------------------------------------------

PiecewiseBoundary::PiecewiseBoundary(std::vector<double> mu, std::vector<double> counts)
    : mu_(std::move(mu)), counts_(std::move(counts)) {
  if (mu_.empty() || mu_.size() != counts_.size()) throw InvalidInput("boundary: need s >= 1 levels with counts");
  for (std::size_t t = 0; t < mu_.size(); ++t) {
    if (!(counts_[t] > 0.0)) throw InvalidInput("boundary: block lengths must be positive");
    if (t + 1 < mu_.size() && !(mu_[t] > mu_[t + 1])) throw InvalidInput("boundary: levels must strictly decrease");
  }
  if (mu_.back() < 0.0) throw InvalidInput("boundary: levels must be nonnegative");
  const double total = std::accumulate(counts_.begin(), counts_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("boundary: block lengths must sum to 1");
  const int s = this->s();
  double below = 0.0;
  for (int i = 1; i <= s; ++i) {
    const int t = s - i + 1;
    a_.push_back(mu_[t - 1] + below - 1.0);
    below += counts_[t - 1];
    b_.push_back(mu_[t - 1] + below - 1.0);
  }
}

PiecewiseBoundary PiecewiseBoundary::from_partition(const Partition& lambda, int n_rows) {
  if (n_rows < 1 || lambda.length() > n_rows) throw InvalidInput("boundary: partition longer than the row count");
  std::vector<double> mu, counts;
  for (int j = 0; j < n_rows; ++j) {
    const double v = static_cast<double>(lambda[j]) / n_rows;
    if (mu.empty() || mu.back() != v) {
      mu.push_back(v);
      counts.push_back(0.0);
    }
    counts.back() += 1.0 / n_rows;
  }
  return PiecewiseBoundary(mu, counts);
}

double PiecewiseBoundary::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (int t = 1; t < s(); ++t) g = std::min(g, mu_[t - 1] - mu_[t]);
  return g;
}

namespace {

bool is_lm(const PeriodicSlot& s) { return s.a == Letter::L && s.b == Sign::Minus; }

double slot_share(const AsymptoticModel& model, int p) {
  return model.segment_weight(p) / model.n(p);
}

// Fraction of the segment p still right of the column.
double right_fraction(const ObservationPoint& obs, int p) {
  return p > obs.pt ? 1.0 : (p == obs.pt ? 1.0 - obs.alpha : 0.0);
}

} // namespace

WeightGroups group_weights(const AsymptoticModel& model, const PiecewiseBoundary& boundary) {
  WeightGroups g;
  std::vector<double> xs;
  double total = 0.0;
  for (int p = 1; p <= model.m(); ++p)
    for (const auto& s : model.segment(p))
      if (is_lm(s)) {
        xs.push_back(s.x);
        total += slot_share(model, p);
      }
  if (xs.empty()) throw InvalidInput("group_weights: no (L,-) slots");
  g.x = distinct_sorted(xs);
  std::reverse(g.x.begin(), g.x.end());
  g.I = static_cast<int>(g.x.size());
  if (!(g.x.front() > 0.0)) throw InvalidInput("group_weights: the largest (L,-) weight must be positive");
  g.rho = total;
  g.theta.assign(g.I, 0.0);
  auto group_of = [&](double x) {
    for (int i = 0; i < g.I; ++i)
      if (std::abs(x - g.x[i]) <= 1e-12 * std::max(1.0, std::abs(x))) return i + 1;
    return 0;
  };
  g.psi.resize(model.m());
  for (int p = 1; p <= model.m(); ++p)
    for (const auto& s : model.segment(p)) {
      const int k = is_lm(s) ? group_of(s.x) : 0;
      g.psi[p - 1].push_back(k);
      if (k > 0) g.theta[k - 1] += slot_share(model, p) / total;
    }
  // rows in decreasing-lambda order; group i takes the next theta_i of them
  g.J.assign(g.I, {});
  double row = 0.0;
  for (int t = 1; t <= boundary.s(); ++t) {
    const double lo = row, hi = row + boundary.count(t);
    row = hi;
    double start = 0.0;
    int owner = 0;
    for (int i = 0; i < g.I; ++i) {
      const double end = start + g.theta[i];
      if (lo >= start - 1e-9 && hi <= end + 1e-9) {
        owner = i + 1;
        break;
      }
      start = end;
    }
    if (owner == 0) throw InvalidInput("group_weights: level " + std::to_string(t) + " splits across weight groups");
    g.J[owner - 1].push_back(t);
  }
  for (int i = 0; i < g.I; ++i) {
    if (g.J[i].empty()) throw InvalidInput("group_weights: a weight group owns no level");
    g.d.push_back(g.J[i].front());
  }
  g.d.push_back(boundary.s() + 1);
  return g;
}

double BandMeasure::total_length() const {
  double s = 0.0;
  for (const auto& b : bands) s += b.gamma - b.beta;
  return s;
}

std::pair<double, double> BandMeasure::support() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& b : bands) {
    lo = std::min(lo, b.beta);
    hi = std::max(hi, b.gamma);
  }
  return {lo, hi};
}

BandMeasure band_measure(const PiecewiseBoundary& boundary, const WeightGroups& groups, int i) {
  if (i < 1 || i > groups.I) throw InvalidInput("band_measure: group index out of range");
  BandMeasure m;
  m.group = i;
  const int s = boundary.s();
  const int di = groups.d[i - 1], dn = groups.d[i];
  const double th = groups.theta[i - 1];
  for (int k = 0; k <= dn - di - 1; ++k) {
    const int idx = s - di - k + 1;
    m.bands.push_back({(boundary.a(idx) - boundary.a(1)) / th, (boundary.b(idx) - boundary.a(1)) / th});
  }
  return m;
}

cplx phi(const BandMeasure& band, cplx t) {
  cplx r = 1.0;
  for (const auto& b : band.bands) {
    if (t == cplx(b.gamma)) throw InvalidInput("phi: t is a pole");
    r *= (t - b.beta) / (t - b.gamma);
  }
  return r;
}

std::pair<Poly, Poly> phi_polys(const BandMeasure& band) {
  Poly P = Poly::constant(1.0), Q = Poly::constant(1.0);
  for (const auto& b : band.bands) {
    P = P * Poly::linear(b.beta);
    Q = Q * Poly::linear(b.gamma);
  }
  return {P, Q};
}

namespace {

cplx nearest(const std::vector<cplx>& roots, cplx z) {
  cplx best = z;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& r : roots)
    if (std::abs(r - z) < bd) {
      bd = std::abs(r - z);
      best = r;
    }
  return best;
}

std::vector<double> sorted_gammas(const BandMeasure& band) {
  std::vector<double> g;
  for (const auto& b : band.bands) g.push_back(b.gamma);
  std::sort(g.begin(), g.end());
  return g;
}

} // namespace

cplx solve_t(const BandMeasure& band, cplx z, int branch) {
  if (band.bands.empty()) throw InvalidInput("solve_t: empty band measure");
  const auto [P, Q] = phi_polys(band);
  if (branch == kPrincipalBranch) {
    if (std::abs(z - 1.0) < 1e-300) throw InvalidInput("solve_t: z = 1 maps to t = infinity");
    const double L = band.total_length();
    const int steps = 80;
    const double s0 = 1e-8;
    cplx t = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double s = s0 * std::pow(1.0 / s0, static_cast<double>(k) / steps);
      const cplx zs = 1.0 + s * (z - 1.0);
      const Poly eq = P - zs * Q;
      if (k == 0) t = L / (zs - 1.0);
      t = nearest(poly_roots(eq), t);
      const Poly deq = eq.derivative();
      t = newton([&](cplx x) { return eq(x); }, [&](cplx x) { return deq(x); }, t, 1e-15, 20).z;
    }
    return t;
  }
  if (z.imag() != 0.0) throw InvalidInput("solve_t: real branches need real z");
  const double zr = z.real();
  const auto g = sorted_gammas(band);
  const int d = static_cast<int>(g.size());
  if (branch < 0 || branch > d) throw InvalidInput("solve_t: branch out of range");
  if ((branch == 0 && !(zr < 1.0)) || (branch == d && !(zr > 1.0)))
    throw InvalidInput("solve_t: branch empty for the given z");
  auto f = [&](double t) { return phi(band, t).real() - zr; };
  // f decreases on the branch: positive at the left end, negative at the right
  const double span = std::max(1.0, g.back() - g.front());
  double lo, hi;
  auto near_pole = [&](double pole, double dir) {
    double h = 1e-3 * span;
    while (h > 1e-300) {
      const double x = pole + dir * h;
      if (dir > 0 ? f(x) > 0.0 : f(x) < 0.0) return x;
      h *= 0.5;
    }
    throw NumericalFailure("solve_t: could not bracket near a pole");
  };
  auto far_end = [&](double from, double dir) {
    double h = span;
    for (int it = 0; it < 2000; ++it) {
      const double x = from + dir * h;
      if (dir < 0 ? f(x) > 0.0 : f(x) < 0.0) return x;
      h *= 2.0;
    }
    throw NumericalFailure("solve_t: could not bracket toward infinity");
  };
  if (branch == 0) {
    lo = far_end(g.front(), -1.0);
    hi = near_pole(g.front(), -1.0);
  } else if (branch == d) {
    lo = near_pole(g.back(), 1.0);
    hi = far_end(g.back(), 1.0);
  } else {
    lo = near_pole(g[branch - 1], 1.0);
    hi = near_pole(g[branch], -1.0);
  }
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  if (iters >= 200) throw NumericalFailure("solve_t: bracketing did not converge");
  return 0.5 * (r.first + r.second);
}

// ---- F^{(i)} ---------------------------------------------------------------

Occupancy occupancy(const AsymptoticModel& model, const WeightGroups& groups, const ObservationPoint& obs) {
  if (obs.pt < 1 || obs.pt > model.m()) throw InvalidInput("occupancy: segment out of range");
  Occupancy o;
  o.gamma.assign(groups.I, 0.0);
  o.eta.assign(groups.I, 0.0);
  for (int p = 1; p <= model.m(); ++p)
    for (std::size_t j = 0; j < model.segment(p).size(); ++j) {
      const int k = groups.psi[p - 1][j];
      if (k > 0) o.gamma[k - 1] += slot_share(model, p) * right_fraction(obs, p);
    }
  for (int i = groups.I - 2; i >= 0; --i) o.eta[i] = o.eta[i + 1] + o.gamma[i + 1];
  return o;
}

PoleSum GroupFunction::at_alpha(double alpha) const { return (A + B * alpha).merged(0.0); }

cplx GroupFunction::operator()(cplx t, double alpha) const {
  const cplx z = phi(band, t);
  return A(z) + alpha * B(z) + rho_theta * t;
}

GroupFunction group_function(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                             const WeightGroups& groups, int i, int pt) {
  if (pt < 1 || pt > model.m()) throw InvalidInput("group_function: segment out of range");
  GroupFunction g;
  g.group = i;
  g.pt = pt;
  g.band = band_measure(boundary, groups, i);
  g.rho_theta = groups.rho * groups.theta[i - 1];
  // gamma_i and eta_i as A-part + alpha * B-part
  double gamA = 0.0, gamB = 0.0, etaA = 0.0, etaB = 0.0;
  for (int p = pt; p <= model.m(); ++p)
    for (std::size_t j = 0; j < model.segment(p).size(); ++j) {
      const int k = groups.psi[p - 1][j];
      if (k < i) continue;
      const double c = slot_share(model, p);
      double& a = k == i ? gamA : etaA;
      double& b = k == i ? gamB : etaB;
      a += c;
      if (p == pt) b -= c;
    }
  double tail = 0.0;
  for (int k = i + 1; k <= groups.I; ++k) tail += groups.theta[k - 1];
  g.A.constant = etaA - groups.rho * tail;
  g.B.constant = etaB;
  if (gamA - g.rho_theta != 0.0) g.A.add(gamA - g.rho_theta, 1.0);
  if (gamB != 0.0) g.B.add(gamB, 1.0);
  if (i == 1) {
    const double x0 = groups.x_top();
    for (int p = 1; p <= pt; ++p) {
      const double w = model.segment_weight(p);
      for (const auto& s : model.segment(p)) {
        if (s.x <= 0.0 || s.b != Sign::Plus) continue;
        PoleSum& dst = p < pt ? g.A : g.B;
        if (s.a == Letter::R)
          dst.add(w * s.zeta, -1.0 / (x0 * s.x));
        else
          dst.add(-w * s.zeta, 1.0 / (x0 * s.x));
      }
    }
  }
  return g;
}

cplx f_piecewise(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups, int i,
                 const ObservationPoint& obs, cplx z) {
  const GroupFunction g = group_function(model, boundary, groups, i, obs.pt);
  const cplx t = solve_t(g.band, z);
  return g.A(z) + obs.alpha * g.B(z) + g.rho_theta * t;
}

PoleSum j_function(const AsymptoticModel& model, const WeightGroups& groups, int i) {
  if (model.m() != 1) throw InvalidInput("j_function: needs a single-segment model");
  if (i < 1 || i > groups.I) throw InvalidInput("j_function: group index out of range");
  PoleSum J;
  double tail = 0.0;
  for (int k = i + 1; k <= groups.I; ++k) tail += groups.theta[k - 1];
  J.constant = -groups.rho * tail;
  if (i == 1) {
    const double x0 = groups.x_top();
    for (const auto& s : model.segment(1)) {
      if (s.x <= 0.0 || s.b != Sign::Plus) continue;
      if (s.a == Letter::R)
        J.add(s.zeta, -1.0 / (x0 * s.x));
      else
        J.add(-s.zeta, 1.0 / (x0 * s.x));
    }
  }
  J.add(-groups.rho * groups.theta[i - 1], 1.0);
  return J;
}

// ---- components ----------------------------------------------------------

namespace {

// Poles in z of F^{(i)} for any segment and alpha.
std::vector<double> z_poles(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups,
                            int i) {
  std::vector<double> ps{1.0};
  for (int pt = 1; pt <= model.m(); ++pt) {
    const GroupFunction g = group_function(model, boundary, groups, i, pt);
    for (double p : g.A.poles()) ps.push_back(p);
    for (double p : g.B.poles()) ps.push_back(p);
  }
  return distinct_sorted(ps);
}

std::vector<cplx> preimages(const BandMeasure& band, double c) {
  const auto [P, Q] = phi_polys(band);
  return poly_roots(P - cplx(c) * Q);
}

bool near_any(double u, const std::vector<double>& pts, double tol) {
  return std::any_of(pts.begin(), pts.end(), [&](double p) { return std::abs(u - p) <= tol * std::max(1.0, std::abs(p)); });
}

bool separated(double a, double b, const std::vector<double>& sing) {
  if (a > b) std::swap(a, b);
  return std::any_of(sing.begin(), sing.end(), [&](double s) { return s > a && s < b; });
}

} // namespace

std::vector<double> component_singularities(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                            const WeightGroups& groups, int i) {
  const BandMeasure band = band_measure(boundary, groups, i);
  std::vector<double> out;
  for (double c : z_poles(model, boundary, groups, i))
    for (const auto& r : preimages(band, c))
      if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r))) out.push_back(r.real());
  return distinct_sorted(out);
}

std::vector<double> component_grid(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                   const WeightGroups& groups, int i, int per_interval) {
  return refined_grid(component_singularities(model, boundary, groups, i), per_interval);
}

ParametricCurve trace_component(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                const WeightGroups& groups, int i, const std::vector<double>& grid) {
  if (model.m() != 1) return trace_component_general(model, boundary, groups, i, grid);
  const BandMeasure band = band_measure(boundary, groups, i);
  const PoleSum J = j_function(model, groups, i);
  const double rt = groups.rho * groups.theta[i - 1];
  const auto sing = component_singularities(model, boundary, groups, i);
  ParametricCurve c;
  double last = 0.0;
  bool have = false;
  for (double t : grid) {
    if (near_any(t, sing, 1e-14)) {
      have = false;
      continue;
    }
    const Jet<1> jt = J(phi(band, Jet<1>::variable(cplx(t))));
    const double Jv = jt.value().real(), J1 = jt.d(1).real();
    double chi = -rt / J1;
    if (!std::isfinite(chi) || chi < -1e-9 || chi > 1.0 + 1e-9) {
      have = false;
      continue;
    }
    chi = std::clamp(chi, 0.0, 1.0);
    if (std::abs(rt + chi * J1) > 1e-9) {
      have = false;
      continue;
    }
    const double kappa = rt * t + chi * Jv;
    if (!have || separated(last, t, sing)) c.breaks.push_back(c.samples.size());
    c.samples.push_back({t, chi, kappa, i});
    last = t;
    have = true;
  }
  return c;
}

ParametricCurve trace_component_general(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                        const WeightGroups& groups, int i, const std::vector<double>& grid) {
  const auto sing = component_singularities(model, boundary, groups, i);
  ParametricCurve c;
  for (int pt = 1; pt <= model.m(); ++pt) {
    const GroupFunction g = group_function(model, boundary, groups, i, pt);
    const double v0 = model.V(pt - 1), dv = model.V(pt) - model.V(pt - 1);
    double last = 0.0;
    bool have = false;
    for (double t : grid) {
      if (near_any(t, sing, 1e-14)) {
        have = false;
        continue;
      }
      const Jet<1> tv = Jet<1>::variable(cplx(t));
      const Jet<1> z = phi(g.band, tv);
      const Jet<1> a = g.A(z) + Jet<1>(cplx(g.rho_theta)) * tv;
      const Jet<1> b = g.B(z);
      const double A0 = a.value().real(), A1 = a.d(1).real(), B0 = b.value().real(), B1 = b.d(1).real();
      double alpha = -A1 / B1;
      if (!std::isfinite(alpha) || alpha < -1e-9 || alpha > 1.0 + 1e-9) {
        have = false;
        continue;
      }
      alpha = std::clamp(alpha, 0.0, 1.0);
      if (std::abs(A1 + alpha * B1) > 1e-9) {
        have = false;
        continue;
      }
      if (!have || separated(last, t, sing)) c.breaks.push_back(c.samples.size());
      c.samples.push_back({t, v0 + alpha * dv, A0 + alpha * B0, i, alpha});
      last = t;
      have = true;
    }
  }
  return c;
}

double curve_distance(const ParametricCurve& a, const ParametricCurve& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.samples)
    for (const auto& q : b.samples) best = std::min(best, std::hypot(p.chi - q.chi, p.kappa - q.kappa));
  return best;
}

Box bounding_box(const ParametricCurve& c) {
  const double inf = std::numeric_limits<double>::infinity();
  Box b{inf, -inf, inf, -inf};
  for (const auto& s : c.samples) {
    b.chi_min = std::min(b.chi_min, s.chi);
    b.chi_max = std::max(b.chi_max, s.chi);
    b.kappa_min = std::min(b.kappa_min, s.kappa);
    b.kappa_max = std::max(b.kappa_max, s.kappa);
  }
  return b;
}

RankCheck component_rank(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups,
                         int i) {
  const BandMeasure band = band_measure(boundary, groups, i);
  std::vector<double> xi{1.0};
  if (i == 1) {
    const double x0 = groups.x_top();
    for (int p = 1; p <= model.m(); ++p)
      for (const auto& s : model.segment(p)) {
        if (s.x <= 0.0 || s.b != Sign::Plus) continue;
        xi.push_back(s.a == Letter::R ? -1.0 / (x0 * s.x) : 1.0 / (x0 * s.x));
      }
  }
  xi = distinct_sorted(xi);
  const int size_j = static_cast<int>(groups.J[i - 1].size());
  RankCheck r;
  r.predicted = i == 1 ? size_j * static_cast<int>(xi.size()) : size_j;
  std::vector<cplx> params;
  for (double c : xi)
    for (const auto& t : preimages(band, c))
      if (std::none_of(params.begin(), params.end(), [&](cplx q) { return std::abs(q - t) < 1e-9 * std::max(1.0, std::abs(t)); }))
        params.push_back(t);
  // phi = 1 at t = infinity
  r.counted = static_cast<int>(params.size()) + 1;
  return r;
}

int piecewise_nonreal_pairs(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                            const WeightGroups& groups, int i, const ObservationPoint& obs, double kappa) {
  const GroupFunction g = group_function(model, boundary, groups, i, obs.pt);
  const PoleSum ps = g.at_alpha(obs.alpha);
  // A(z) = kappa - ps(z) = a(z)/d(z)
  Poly d = Poly::constant(1.0);
  for (const auto& t : ps.terms) d = d * Poly::linear(t.pole);
  const Poly a = cplx(-1.0) * ps.cleared(kappa);
  Poly lhs = Poly::linear(0.0), rhs = Poly::constant(1.0);
  for (const auto& b : g.band.bands) {
    lhs = lhs * (a - cplx(g.rho_theta * b.gamma) * d);
    rhs = rhs * (a - cplx(g.rho_theta * b.beta) * d);
  }
  return nonreal_pair_count(poly_roots(lhs - rhs));
}

// ---- density and moments ---------------------------------------------------

double piecewise_mass(const AsymptoticModel& model, const WeightGroups& groups, const ObservationPoint& obs) {
  const Occupancy o = occupancy(model, groups, obs);
  return std::accumulate(o.gamma.begin(), o.gamma.end(), 0.0);
}

namespace {

// (G(t) - w) times the cleared denominators, G(t) = ps(phi(t)) + rt t.
Poly cleared_g(const PoleSum& ps, double rt, const Poly& P, const Poly& Q, cplx w) {
  std::vector<Poly> D;
  for (const auto& t : ps.terms) D.push_back(P - cplx(t.pole) * Q);
  Poly all = Poly::constant(1.0);
  for (const auto& x : D) all = all * x;
  Poly out = Poly(std::vector<cplx>{ps.constant - w, rt}) * all;
  for (std::size_t k = 0; k < D.size(); ++k) {
    Poly term = cplx(ps.terms[k].coef) * P;
    for (std::size_t j = 0; j < D.size(); ++j)
      if (j != k) term = term * D[j];
    out = out + term;
  }
  return out;
}

// Unwrapped arg of phi(t(w)) along w = kappa + i y, y from Y down to each
// of the requested heights (decreasing), continuing the same root.
std::vector<double> tracked_phi_arg(const GroupFunction& g, const PoleSum& ps, double gamma_i, double kappa,
                                    const std::vector<double>& heights) {
  const auto [P, Q] = phi_polys(g.band);
  double scale = 1.0 + std::abs(kappa) + std::abs(ps.constant);
  for (const auto& t : ps.terms) scale += std::abs(t.coef) * (1.0 + std::abs(t.pole));
  const double Y = 1e4 * scale;
  auto G = [&](cplx x) { return ps(phi(g.band, x)) + g.rho_theta * x; };
  auto dG = [&](cplx x) {
    const Jet<1> j = ps(phi(g.band, Jet<1>::variable(x))) + Jet<1>(cplx(g.rho_theta)) * Jet<1>::variable(x);
    return j.d(1);
  };
  cplx w(kappa, Y);
  cplx t = newton([&](cplx x) { return G(x) - w; }, dG, (w - ps.constant) / gamma_i).z;
  cplx z = phi(g.band, t);
  double arg = std::arg(z);
  auto step_to = [&](double y) {
    w = cplx(kappa, y);
    t = nearest(poly_roots(cleared_g(ps, g.rho_theta, P, Q, w)), t);
    t = newton([&](cplx x) { return G(x) - w; }, dG, t, 1e-15, 20).z;
    const cplx zn = phi(g.band, t);
    arg += std::arg(zn / z);
    z = zn;
  };
  std::vector<double> out;
  double from = Y;
  for (double h : heights) {
    const int steps = from == Y ? 90 : 3;
    for (int s = 1; s <= steps; ++s) step_to(from * std::pow(h / from, static_cast<double>(s) / steps));
    out.push_back(arg);
    from = h;
  }
  return out;
}

} // namespace

double density_piecewise(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups,
                         const ObservationPoint& obs, double kappa) {
  const Occupancy o = occupancy(model, groups, obs);
  std::vector<GroupFunction> gs;
  std::vector<PoleSum> ps;
  for (int i = 1; i <= groups.I; ++i) {
    if (!(o.gamma[i - 1] > 0.0)) continue;
    gs.push_back(group_function(model, boundary, groups, i, obs.pt));
    ps.push_back(gs.back().at_alpha(obs.alpha));
  }
  const double d0 = 1e-6 * (1.0 + std::abs(kappa));
  double D1 = 0.0, D2 = 0.0, D4 = 0.0;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    const auto a = tracked_phi_arg(gs[k], ps[k], o.gamma[gs[k].group - 1], kappa, {d0, d0 / 2, d0 / 4});
    D1 -= a[0] / M_PI;
    D2 -= a[1] / M_PI;
    D4 -= a[2] / M_PI;
  }
  return std::clamp((8.0 * D4 - 6.0 * D2 + D1) / 3.0, 0.0, 1.0);
}

MomentResult piecewise_moment(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                              const WeightGroups& groups, const ObservationPoint& obs, int k) {
  if (k < 0) throw InvalidInput("piecewise_moment: k must be nonnegative");
  const Occupancy o = occupancy(model, groups, obs);
  MomentResult r;
  for (int i = 1; i <= groups.I; ++i) {
    if (!(o.gamma[i - 1] > 0.0)) continue;
    const GroupFunction g = group_function(model, boundary, groups, i, obs.pt);
    const PoleSum ps = g.at_alpha(obs.alpha);
    double R = 1.0;
    for (const auto& b : g.band.bands) R = std::max({R, std::abs(b.beta), std::abs(b.gamma)});
    for (const auto& t : ps.terms)
      for (const auto& x : preimages(g.band, t.pole)) R = std::max(R, std::abs(x));
    R = 2.0 * R + 1.0;
    auto integrand = [&](cplx t) {
      const Jet<1> z = phi(g.band, Jet<1>::variable(t));
      const cplx G = ps(z.value()) + g.rho_theta * t;
      return std::pow(G, k + 1) * z.d(1) / z.value();
    };
    const auto c = circle_integral(integrand, 0.0, R, 1e-14, 256);
    // the small circle around z = 1 maps to a clockwise circle in t
    r.value -= c.value.real() / (k + 1);
    r.self_error += c.self_error / (k + 1);
    r.nodes = std::max(r.nodes, c.nodes);
  }
  return r;
}

// ---- coset Schur formula -----------------------------------------------------

namespace {

// The coset terms alternate in sign and nearly cancel when two weight groups
// sit close together, so they are summed with 50 significant digits.
using Wide = boost::multiprecision::cpp_bin_float_50;

// s_phi(1,...,1) with k ones by the hook-content formula, exact in Wide
Wide principal_wide(const Partition& phi, int k) {
  if (phi.length() > k) return Wide(0);
  const Partition c = conjugate(phi);
  Wide v = 1;
  for (int i = 0; i < phi.length(); ++i)
    for (int j = 0; j < phi[i]; ++j) {
      const int hook = phi[i] - j + c[j] - i - 1;
      v *= Wide(k + j - i);
      v /= Wide(hook);
    }
  return v;
}

} // namespace

double coset_schur(const Partition& lambda, const std::vector<double>& x, const std::vector<double>& u,
                   CosetMode mode) {
  const int N = static_cast<int>(x.size());
  if (!u.empty() && static_cast<int>(u.size()) != N) throw InvalidInput("coset_schur: u and x differ in length");
  if (lambda.length() > N) return 0.0;
  std::vector<double> gx = distinct_sorted(x);
  std::reverse(gx.begin(), gx.end());
  const int n = static_cast<int>(gx.size());
  std::vector<int> group(N);
  std::vector<std::vector<int>> members(n);
  for (int a = 0; a < N; ++a) {
    for (int g = 0; g < n; ++g)
      if (std::abs(x[a] - gx[g]) <= 1e-12 * std::max(1.0, std::abs(x[a]))) group[a] = g;
    members[group[a]].push_back(a);
  }
  auto w = [&](int a) { return u.empty() ? Wide(x[a]) : Wide(u[a]) * Wide(x[a]); };
  // variables in group blocks; cross differences in that order
  Wide cross = 1;
  for (int g = 0; g < n; ++g)
    for (int h = g + 1; h < n; ++h)
      for (int a : members[g])
        for (int b : members[h]) cross *= w(a) - w(b);
  std::vector<int> l(N);
  for (int j = 0; j < N; ++j) l[j] = lambda[j] + N - 1 - j;

  std::vector<int> need(n);
  for (int g = 0; g < n; ++g) need[g] = static_cast<int>(members[g].size());
  std::vector<int> assign(N);
  Wide total = 0;
  auto term = [&]() {
    int inversions = 0;
    for (int j = 0; j < N; ++j)
      for (int k = j + 1; k < N; ++k)
        if (assign[j] > assign[k]) ++inversions;
    Wide v = inversions % 2 == 0 ? 1 : -1;
    for (int g = 0; g < n; ++g) {
      std::vector<int> cols;
      for (int j = 0; j < N; ++j)
        if (assign[j] == g) cols.push_back(j);
      const int ng = static_cast<int>(cols.size());
      std::vector<int> parts(ng);
      for (int r = 0; r < ng; ++r) parts[r] = l[cols[r]] - (ng - 1 - r);
      const Partition ph(parts);
      v *= boost::multiprecision::pow(Wide(gx[g]), ph.size());
      if (u.empty()) {
        v *= principal_wide(ph, ng);
      } else {
        std::vector<double> ratios;
        for (int a : members[g]) ratios.push_back(u[a]);
        v *= Wide(schur(ph, ratios));
      }
    }
    return v;
  };
  if (mode == CosetMode::Dominant) {
    int j = 0;
    for (int g = 0; g < n; ++g)
      for (int r = 0; r < need[g]; ++r) assign[j++] = g;
    return static_cast<double>(term() / cross);
  }
  // all column-to-group assignments with the group sizes fixed
  std::function<void(int)> rec = [&](int j) {
    if (j == N) {
      total += term();
      return;
    }
    for (int g = 0; g < n; ++g) {
      if (need[g] == 0) continue;
      --need[g];
      assign[j] = g;
      rec(j + 1);
      ++need[g];
    }
  };
  rec(0);
  return static_cast<double>(total / cross);
}

} // namespace railyard
