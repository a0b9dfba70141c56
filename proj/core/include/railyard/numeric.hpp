#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace railyard {

using cplx = std::complex<double>;

// Truncated Taylor series c_0 + c_1 h + ... + c_N h^N. Arithmetic on jets
// propagates derivatives exactly up to order N.
template <int N, class T = cplx>
struct Jet {
  std::array<T, N + 1> c{};

  Jet() = default;
  Jet(T v) { c[0] = v; }
  static Jet variable(T v) {
    Jet j(v);
    if constexpr (N >= 1) j.c[1] = T(1);
    return j;
  }
  T value() const { return c[0]; }
  // k-th derivative
  T d(int k) const {
    T f = c[k];
    for (int i = 2; i <= k; ++i) f *= T(i);
    return f;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& v : a.c) v = -v;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      T s = a.c[k];
      for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
      r.c[k] = s / b.c[0];
    }
    return r;
  }
};

// Polynomial with complex coefficients, ascending powers.
class Poly {
public:
  Poly() = default;
  explicit Poly(std::vector<cplx> coef) : c_(std::move(coef)) { trim(); }
  static Poly constant(cplx v) { return Poly({v}); }
  // (z - root)
  static Poly linear(cplx root) { return Poly({-root, 1.0}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return c_; }
  cplx operator()(cplx z) const;
  Poly derivative() const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(cplx s, const Poly& a);

private:
  void trim();
  std::vector<cplx> c_;
};

// All complex roots: companion-matrix eigenvalues, then Newton polish.
std::vector<cplx> poly_roots(const Poly& p);

// Number of conjugate pairs among the roots, where a root is real when
// |Im z| <= tol * max(1, |z|).
int nonreal_pair_count(const std::vector<cplx>& roots, double tol = 1e-7);

// c_0 + sum_k c_k z/(z - p_k): the shape shared by F, U, V and H.
struct PoleTerm {
  double coef;
  double pole;
};

class PoleSum {
public:
  double constant = 0.0;
  std::vector<PoleTerm> terms;

  void add(double coef, double pole) { terms.push_back({coef, pole}); }
  cplx operator()(cplx z) const;
  // n-th derivative at z
  cplx derivative(cplx z, int n) const;
  template <int N, class T>
  Jet<N, T> operator()(const Jet<N, T>& z) const {
    Jet<N, T> r{T(constant)};
    for (const auto& t : terms) r += Jet<N, T>(T(t.coef)) * z / (z - Jet<N, T>(T(t.pole)));
    return r;
  }

  // Terms with equal poles merged; coefficients summing to 0 dropped.
  PoleSum merged(double tol = 1e-14) const;
  // Distinct poles, ascending.
  std::vector<double> poles() const;
  // Residue of f(z) at pole p (coef * p after merging).
  double residue(double pole) const;
  // (f(z) - w) * prod (z - p_k) over distinct poles.
  Poly cleared(cplx w) const;

  PoleSum operator+(const PoleSum& o) const;
  PoleSum operator*(double s) const;
};

// Distinct values up to a relative tolerance, ascending.
std::vector<double> distinct_sorted(std::vector<double> v, double tol = 1e-12);

// Newton iteration on a holomorphic function with derivative. Returns the
// final iterate; `converged` reports |step| < tol * max(1, |z|).
struct NewtonResult {
  cplx z;
  bool converged = false;
  int iterations = 0;
};
NewtonResult newton(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& df, cplx z0,
                    double tol = 1e-14, int max_iter = 100);

// (1/2 pi i) * contour integral of f over the circle |z - c| = r, by the
// trapezoid rule with node doubling until two successive values differ by
// less than tol (absolute, scaled by max(1, |value|)).
struct ContourResult {
  cplx value;
  double self_error = 0.0; // change at the last doubling
  int nodes = 0;
};
ContourResult circle_integral(const std::function<cplx(cplx)>& f, cplx center, double radius, double tol = 1e-13,
                              int min_nodes = 64, int max_nodes = 1 << 16);

// Points accumulating logarithmically at each end of every interval cut by
// `singular` on the real line, `per_interval` points per interval, including
// the two unbounded tails out to |u| ~ 1e6 beyond the extreme singularities.
std::vector<double> refined_grid(const std::vector<double>& singular, int per_interval, double closest = 1e-7);

} // namespace railyard
