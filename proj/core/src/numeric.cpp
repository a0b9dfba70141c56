#include "railyard/numeric.hpp"

#include "railyard/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace railyard {

void Poly::trim() {
  while (c_.size() > 1 && c_.back() == cplx(0.0)) c_.pop_back();
  if (c_.empty()) c_.push_back(0.0);
}

cplx Poly::operator()(cplx z) const {
  cplx v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * z + *it;
  return v;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly({0.0});
  std::vector<cplx> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Poly(std::move(d));
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
  return Poly(std::move(r));
}

Poly operator-(const Poly& a, const Poly& b) { return a + cplx(-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<cplx> r(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(r));
}

Poly operator*(cplx s, const Poly& a) {
  std::vector<cplx> r = a.c_;
  for (auto& v : r) v *= s;
  return Poly(std::move(r));
}

std::vector<cplx> poly_roots(const Poly& p) {
  const int n = p.degree();
  if (n <= 0) return {};
  const auto& c = p.coefficients();
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericalFailure("poly_roots: eigenvalue solver failed");
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  const Poly dp = p.derivative();
  for (auto& z : roots) {
    for (int it = 0; it < 8; ++it) {
      const cplx d = dp(z);
      if (std::abs(d) == 0.0) break;
      const cplx step = p(z) / d;
      // Newton near a multiple root can jump to a neighbour; keep small steps only
      if (!(std::abs(step) < 1e-3 * std::max(1.0, std::abs(z)))) break;
      z -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
  }
  return roots;
}

int nonreal_pair_count(const std::vector<cplx>& roots, double tol) {
  int n = 0;
  for (const auto& z : roots)
    if (z.imag() > tol * std::max(1.0, std::abs(z))) ++n;
  return n;
}

cplx PoleSum::operator()(cplx z) const {
  cplx v = constant;
  for (const auto& t : terms) v += t.coef * z / (z - t.pole);
  return v;
}

cplx PoleSum::derivative(cplx z, int n) const {
  if (n == 0) return (*this)(z);
  // d^n/dz^n [z/(z-p)] = p (-1)^n n! / (z-p)^(n+1)
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  const double sgn = n % 2 == 0 ? 1.0 : -1.0;
  cplx v = 0.0;
  for (const auto& t : terms) v += t.coef * t.pole * sgn * fact / std::pow(z - t.pole, n + 1);
  return v;
}

std::vector<double> distinct_sorted(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || std::abs(x - out.back()) > tol * std::max(1.0, std::abs(x))) out.push_back(x);
  return out;
}

PoleSum PoleSum::merged(double tol) const {
  PoleSum out;
  out.constant = constant;
  for (double p : poles()) {
    double c = 0.0;
    for (const auto& t : terms)
      if (std::abs(t.pole - p) <= 1e-12 * std::max(1.0, std::abs(p))) c += t.coef;
    if (std::abs(c) > tol) out.add(c, p);
  }
  return out;
}

std::vector<double> PoleSum::poles() const {
  std::vector<double> ps;
  for (const auto& t : terms) ps.push_back(t.pole);
  return distinct_sorted(ps);
}

double PoleSum::residue(double pole) const {
  double c = 0.0;
  for (const auto& t : terms)
    if (std::abs(t.pole - pole) <= 1e-12 * std::max(1.0, std::abs(pole))) c += t.coef;
  return c * pole;
}

Poly PoleSum::cleared(cplx w) const {
  const PoleSum m = merged();
  // z/(z-p) = 1 + p/(z-p)
  cplx c0 = m.constant - w;
  for (const auto& t : m.terms) c0 += t.coef;
  std::vector<Poly> lin;
  for (const auto& t : m.terms) lin.push_back(Poly::linear(t.pole));
  Poly all = Poly::constant(1.0);
  for (const auto& l : lin) all = all * l;
  Poly out = c0 * all;
  for (std::size_t k = 0; k < m.terms.size(); ++k) {
    Poly others = Poly::constant(m.terms[k].coef * m.terms[k].pole);
    for (std::size_t j = 0; j < lin.size(); ++j)
      if (j != k) others = others * lin[j];
    out = out + others;
  }
  return out;
}

PoleSum PoleSum::operator+(const PoleSum& o) const {
  PoleSum r = *this;
  r.constant += o.constant;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

PoleSum PoleSum::operator*(double s) const {
  PoleSum r = *this;
  r.constant *= s;
  for (auto& t : r.terms) t.coef *= s;
  return r;
}

NewtonResult newton(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& df, cplx z0, double tol,
                    int max_iter) {
  NewtonResult r{z0, false, 0};
  for (int i = 0; i < max_iter; ++i) {
    const cplx d = df(r.z);
    if (std::abs(d) == 0.0) break;
    const cplx step = f(r.z) / d;
    r.z -= step;
    r.iterations = i + 1;
    if (std::abs(step) < tol * std::max(1.0, std::abs(r.z))) {
      r.converged = true;
      break;
    }
  }
  return r;
}

ContourResult circle_integral(const std::function<cplx(cplx)>& f, cplx center, double radius, double tol,
                              int min_nodes, int max_nodes) {
  auto trap = [&](int n) {
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx e = std::polar(1.0, 2.0 * M_PI * k / n);
      // dz = i r e dtheta, so (1/2 pi i) dz -> r e dtheta / (2 pi)
      s += f(center + radius * e) * radius * e;
    }
    return s / static_cast<double>(n);
  };
  ContourResult r;
  r.nodes = min_nodes;
  r.value = trap(r.nodes);
  r.self_error = std::numeric_limits<double>::infinity();
  while (r.nodes < max_nodes) {
    const cplx next = trap(2 * r.nodes);
    r.self_error = std::abs(next - r.value);
    r.value = next;
    r.nodes *= 2;
    if (r.self_error < tol * std::max(1.0, std::abs(r.value))) break;
  }
  return r;
}

std::vector<double> refined_grid(const std::vector<double>& singular, int per_interval, double closest) {
  const auto s = distinct_sorted(singular);
  std::vector<double> g;
  if (per_interval < 2) per_interval = 2;
  const double far = 1e6;
  auto tail = [&](double from, double dir) {
    const double lo = std::log(closest * std::max(1.0, std::abs(from))), hi = std::log(far);
    for (int k = 0; k < per_interval; ++k) g.push_back(from + dir * std::exp(lo + (hi - lo) * k / (per_interval - 1)));
  };
  if (s.empty()) {
    for (int k = 0; k < per_interval; ++k) g.push_back(-far + 2 * far * k / (per_interval - 1));
    return g;
  }
  tail(s.front(), -1.0);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = s[i], b = s[i + 1], w = b - a;
    // logistic spacing: distances from the ends run down to closest * w
    const double L = std::log(1.0 / closest);
    for (int k = 0; k < per_interval; ++k) {
      const double v = -L + 2.0 * L * (k + 0.5) / per_interval;
      g.push_back(a + w / (1.0 + std::exp(-v)));
    }
  }
  tail(s.back(), 1.0);
  std::sort(g.begin(), g.end());
  return g;
}

} // namespace railyard
