#include "railyard/limitshape.hpp"

#include "railyard/error.hpp"
#include "railyard/schur_process.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace railyard {

namespace {

bool is_kind(const PeriodicSlot& s, Letter a, Sign b) { return s.a == a && s.b == b; }

void check_obs(const AsymptoticModel& model, const ObservationPoint& obs) {
  if (obs.pt < 1 || obs.pt > model.m()) throw InvalidInput("observation segment out of range");
  if (obs.alpha < 0.0 || obs.alpha > 1.0) throw InvalidInput("observation alpha outside [0,1]");
}

} // namespace

cplx q_prime(const AsymptoticModel& model, const ObservationPoint& obs, int M, cplx u) {
  check_obs(model, obs);
  if (M < 1) throw InvalidInput("q_prime: M must be positive");
  cplx q = 0.0;
  for (int p = 1; p <= model.m(); ++p) {
    const double wp = model.segment_weight(p);
    const double beta = p < obs.pt ? 1.0 : (p == obs.pt ? obs.alpha : 0.0);
    for (const auto& s : model.segment(p)) {
      if (is_kind(s, Letter::L, Sign::Minus)) {
        const cplx xm = std::pow(cplx(s.x), M);
        q += wp * s.zeta * (double(M) * std::pow(u, M - 1) / (std::pow(u, M) - xm) - 1.0 / (u - s.x));
      } else if (beta > 0.0 && is_kind(s, Letter::R, Sign::Plus)) {
        q += beta * wp * s.zeta * s.x / (1.0 + u * s.x);
      } else if (beta > 0.0 && is_kind(s, Letter::L, Sign::Plus)) {
        q += beta * wp * s.zeta * s.x / (1.0 - u * s.x);
      }
    }
  }
  return q;
}

cplx w_eval(const AsymptoticModel& model, const ObservationPoint& obs, cplx u) {
  check_obs(model, obs);
  cplx w = 0.0;
  for (int p = obs.pt; p <= model.m(); ++p) {
    const double f = p == obs.pt ? 1.0 - obs.alpha : 1.0;
    for (const auto& s : model.segment(p))
      if (is_kind(s, Letter::L, Sign::Minus)) w += f * model.segment_weight(p) / model.n(p) / (u - s.x);
  }
  return w;
}

cplx f_eval(const AsymptoticModel& model, const ObservationPoint& obs, int M, cplx z) {
  return z * (q_prime(model, obs, M, z) + w_eval(model, obs, z));
}

AffineF f_affine(const AsymptoticModel& model, int pt, int M) {
  if (M != 1 && M != 2) throw InvalidInput("F with real poles needs M in {1, 2}");
  if (pt < 1 || pt > model.m()) throw InvalidInput("segment out of range");
  AffineF f;
  auto add = [](PoleSum& ps, double c, double pole) {
    if (c == 0.0) return;
    if (pole == 0.0)
      ps.constant += c; // z/(z - 0) = 1
    else
      ps.add(c, pole);
  };
  for (int p = 1; p <= model.m(); ++p) {
    const double wp = model.segment_weight(p);
    for (const auto& s : model.segment(p)) {
      if (is_kind(s, Letter::L, Sign::Minus)) {
        if (M == 2) add(f.A, wp * s.zeta, -s.x);
        const double c = wp / model.n(p);
        if (p > pt) add(f.A, c, s.x);
        if (p == pt) {
          add(f.A, c, s.x);
          add(f.B, -c, s.x);
        }
      } else if (s.x > 0.0 && p <= pt && (is_kind(s, Letter::R, Sign::Plus) || is_kind(s, Letter::L, Sign::Plus))) {
        const bool r = s.a == Letter::R;
        const double c = r ? wp * s.zeta : -wp * s.zeta;
        const double pole = r ? -1.0 / s.x : 1.0 / s.x;
        add(p < pt ? f.A : f.B, c, pole);
      }
    }
  }
  return f;
}

PoleSum f_function(const AsymptoticModel& model, const ObservationPoint& obs, int M) {
  check_obs(model, obs);
  const AffineF f = f_affine(model, obs.pt, M);
  return (f.A + f.B * obs.alpha).merged();
}

std::vector<double> contour_poles(const AsymptoticModel& model, const ObservationPoint& obs) {
  check_obs(model, obs);
  std::vector<double> xs;
  for (int p = obs.pt; p <= model.m(); ++p) {
    if (p == obs.pt && obs.alpha >= 1.0) continue;
    for (const auto& s : model.segment(p))
      if (is_kind(s, Letter::L, Sign::Minus) && s.x > 0.0) xs.push_back(s.x);
  }
  return distinct_sorted(xs);
}

std::vector<cplx> f_singularities(const AsymptoticModel& model, const ObservationPoint& obs, int M) {
  check_obs(model, obs);
  std::vector<cplx> out;
  for (double x : contour_poles(model, obs)) out.emplace_back(x);
  for (int p = 1; p <= model.m(); ++p) {
    const double beta = p < obs.pt ? 1.0 : (p == obs.pt ? obs.alpha : 0.0);
    for (const auto& s : model.segment(p)) {
      if (s.x <= 0.0) continue;
      if (is_kind(s, Letter::L, Sign::Minus)) {
        for (int k = 1; k < M; ++k) out.push_back(s.x * std::polar(1.0, 2.0 * M_PI * k / M));
      } else if (beta > 0.0 && is_kind(s, Letter::R, Sign::Plus)) {
        out.emplace_back(-1.0 / s.x);
      } else if (beta > 0.0 && is_kind(s, Letter::L, Sign::Plus)) {
        out.emplace_back(1.0 / s.x);
      }
    }
  }
  std::vector<cplx> uniq;
  for (const auto& z : out)
    if (std::none_of(uniq.begin(), uniq.end(), [&](cplx w) { return std::abs(w - z) < 1e-12 * std::max(1.0, std::abs(z)); }))
      uniq.push_back(z);
  return uniq;
}

MomentResult moment(const AsymptoticModel& model, const ObservationPoint& obs, int M, int k) {
  if (k < 0) throw InvalidInput("moment: k must be nonnegative");
  const auto poles = contour_poles(model, obs);
  auto sing = f_singularities(model, obs, M);
  sing.emplace_back(0.0);
  MomentResult r;
  for (double x : poles) {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& s : sing)
      if (std::abs(s - x) > 1e-12 * std::max(1.0, x)) dist = std::min(dist, std::abs(s - x));
    if (!(dist > 1e-9)) throw InvalidInput("moment: contour cannot separate pole " + std::to_string(x));
    const double radius = 0.5 * dist;
    auto integrand = [&](cplx z) { return std::pow(f_eval(model, obs, M, z), k + 1) / z; };
    const auto c = circle_integral(integrand, x, radius, 1e-14, 128);
    r.value += c.value.real() / (k + 1);
    r.self_error += c.self_error / (k + 1);
    r.nodes = std::max(r.nodes, c.nodes);
  }
  return r;
}

double limit_mass(const AsymptoticModel& model, const ObservationPoint& obs, int M) {
  const PoleSum f = f_function(model, obs, M);
  double mass = 0.0;
  for (double x : contour_poles(model, obs))
    for (const auto& t : f.terms)
      if (std::abs(t.pole - x) <= 1e-12 * std::max(1.0, x)) mass += t.coef;
  return mass;
}

namespace {

// Continues the root of f(z) = w attached to `pole` from w = kappa + iY down
// to kappa + i heights[0], then on to each further (smaller) height; returns
// the unwrapped argument of the root at every height.
std::vector<double> tracked_args(const PoleSum& f, double pole, double kappa, const std::vector<double>& heights) {
  double scale = 1.0 + std::abs(kappa) + std::abs(f.constant);
  for (const auto& t : f.terms) scale += std::abs(t.coef) * (1.0 + std::abs(t.pole));
  const double Y = 1e4 * scale;
  const double res = f.residue(pole);
  cplx w(kappa, Y);
  cplx z = pole + res / w;
  auto g = [&](cplx zz) { return f(zz) - w; };
  auto dg = [&](cplx zz) { return f.derivative(zz, 1); };
  z = newton(g, dg, z).z;
  double arg = std::arg(z);
  // Log-spaced descent in Im w. A step is halved until the continued root is
  // clearly nearer than any other, so neighbouring roots are never swapped.
  auto descend = [&](double from, double to, int steps) {
    const double total = std::log(to / from);
    double done = 0.0, step = total / steps;
    while (done != total) {
      const double next = std::abs(done + step) >= std::abs(total) ? total : done + step;
      const cplx wn(kappa, from * std::exp(next));
      const auto roots = poly_roots(f.cleared(wn));
      cplx best = z;
      double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
      for (const auto& r : roots) {
        const double d = std::abs(r - z);
        if (d < d1) {
          d2 = d1;
          d1 = d;
          best = r;
        } else if (d < d2) {
          d2 = d;
        }
      }
      if (d1 > 0.25 * d2 && std::abs(next - done) > 1e-6 * std::abs(total)) {
        step = (next - done) / 2;
        continue;
      }
      w = wn;
      best = newton(g, dg, best, 1e-15, 20).z;
      arg += std::arg(best / z);
      z = best;
      done = next;
      step = std::abs(step) < std::abs(total / steps) ? step * 2 : step;
    }
  };
  std::vector<double> out;
  double from = Y;
  for (std::size_t h = 0; h < heights.size(); ++h) {
    descend(from, heights[h], h == 0 ? 160 : 4);
    out.push_back(arg);
    from = heights[h];
  }
  return out;
}

} // namespace

double density(const AsymptoticModel& model, const ObservationPoint& obs, int M, double kappa) {
  const PoleSum f = f_function(model, obs, M);
  const auto poles = contour_poles(model, obs);
  const double d0 = 1e-6 * (1.0 + std::abs(kappa));
  double sum[3] = {0.0, 0.0, 0.0};
  for (double x : poles)
    if (f.residue(x) != 0.0) {
      const auto a = tracked_args(f, x, kappa, {d0, d0 / 2, d0 / 4});
      for (int h = 0; h < 3; ++h) sum[h] += a[h];
    }
  const double D1 = -sum[0] / M_PI, D2 = -sum[1] / M_PI, D4 = -sum[2] / M_PI;
  const double D0 = (8.0 * D4 - 6.0 * D2 + D1) / 3.0;
  return std::clamp(D0, 0.0, 1.0);
}

int nonreal_pairs(const AsymptoticModel& model, const ObservationPoint& obs, int M, double kappa) {
  const PoleSum f = f_function(model, obs, M);
  return nonreal_pair_count(poly_roots(f.cleared(kappa)));
}

EmpiricalMoments empirical_moments(const AsymptoticModel& model, int N, double chi, int k_max, int samples,
                                   std::uint64_t seed, int threads) {
  const RailYardSpec spec = realize(model, N);
  const int t = realized_column(model, N, chi);
  int nt = 0;
  for (int i = t; i <= spec.r(); ++i)
    if (spec.kind(i) == SlotKind{Letter::L, Sign::Minus}) ++nt;
  const auto seqs = sample_shuffle(spec, seed, samples, threads);
  EmpiricalMoments em;
  em.samples = samples;
  em.column = t;
  em.mean.assign(k_max, 0.0);
  em.stderr_.assign(k_max, 0.0);
  std::vector<double> sq(k_max, 0.0);
  for (const auto& seq : seqs) {
    const Partition& lam = seq[t - spec.l()];
    if (lam.length() > nt) throw NumericalFailure("empirical_moments: column partition longer than n_t");
    for (int k = 1; k <= k_max; ++k) {
      double m = 0.0;
      for (int i = 1; i <= nt; ++i) m += std::pow((lam[i - 1] + nt - i) / static_cast<double>(N), k);
      m /= N;
      em.mean[k - 1] += m;
      sq[k - 1] += m * m;
    }
  }
  for (int k = 0; k < k_max; ++k) {
    const double mu = em.mean[k] / samples;
    const double var = std::max(0.0, sq[k] / samples - mu * mu) * samples / std::max(1, samples - 1);
    em.mean[k] = mu;
    em.stderr_[k] = std::sqrt(var / samples);
  }
  return em;
}

SupportIntegral integrate_on_support(const std::function<double(double)>& rho, double lo, double hi, int scan,
                                     double tol) {
  if (!(hi > lo) || scan < 2) throw InvalidInput("integrate_on_support: empty range");
  const double thresh = 1e-12;
  // 0: empty, 1: liquid, 2: saturated at 1
  auto state = [&](double x) {
    const double v = rho(x);
    if (v <= thresh) return 0;
    return std::abs(v - 1.0) <= thresh ? 2 : 1;
  };
  struct Cut {
    double x;
    int to;
  };
  std::vector<Cut> cuts;
  // Transitions inside (a, b), where sa != sb; a third state met on the way
  // is split off recursively.
  std::function<void(double, int, double, int, int)> refine = [&](double a, int sa, double b, int sb, int depth) {
    double u = a, v = b;
    int sv = sb;
    for (int it = 0; it < 50; ++it) {
      const double c = 0.5 * (u + v);
      const int sc = state(c);
      if (sc == sa) {
        u = c;
      } else {
        v = c;
        sv = sc;
      }
    }
    const double e = 0.5 * (u + v);
    cuts.push_back({e, sv});
    if (sv != sb && depth < 4) refine(e, sv, b, sb, depth + 1);
  };
  const double h = (hi - lo) / scan;
  const int first = state(lo);
  int prev = first;
  for (int k = 1; k <= scan; ++k) {
    const double x = lo + h * k;
    const int cur = state(x);
    if (cur != prev) refine(x - h, prev, x, cur, 0);
    prev = cur;
  }

  SupportIntegral out;
  auto piece = [&](double a, double b, int st) {
    if (st == 0 || !(b > a)) return;
    if (!out.intervals.empty() && out.intervals.back().second == a)
      out.intervals.back().second = b;
    else
      out.intervals.push_back({a, b});
    if (st == 2) {
      out.value += b - a;
      return;
    }
    // x = a + (b - a)(1 - cos th)/2 smooths square-root behaviour at the ends
    auto g = [&](double th) { return rho(a + 0.5 * (b - a) * (1.0 - std::cos(th))) * 0.5 * (b - a) * std::sin(th); };
    out.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 0.0, M_PI, 12, tol);
  };
  double start = lo;
  int st = first;
  for (const auto& c : cuts) {
    piece(start, c.x, st);
    start = c.x;
    st = c.to;
  }
  piece(start, hi, st);
  return out;
}

} // namespace railyard
