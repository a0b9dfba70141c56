#pragma once

#include "railyard/frozen.hpp"
#include "railyard/limitshape.hpp"
#include "railyard/model.hpp"
#include "railyard/numeric.hpp"
#include "railyard/partitions.hpp"

#include <vector>

namespace railyard {

// Left boundary with s constant blocks. Levels and block lengths are given
// in units of N_{L,-} (the number of (L,-) slots), in level order: counts[t]
// rows sit at level mu[t], and mu is strictly decreasing.
class PiecewiseBoundary {
public:
  PiecewiseBoundary() = default;
  PiecewiseBoundary(std::vector<double> mu, std::vector<double> counts);
  // Scaled data from a finite partition with n_rows = N_{L,-} rows.
  static PiecewiseBoundary from_partition(const Partition& lambda, int n_rows);

  int s() const { return static_cast<int>(mu_.size()); }
  double mu(int t) const { return mu_.at(t - 1); }         // t in [1..s], decreasing
  double count(int t) const { return counts_.at(t - 1); }  // rows at level mu(t)
  // Block ends in increasing order, i in [1..s]: block i is the level mu(s-i+1).
  double a(int i) const { return a_.at(i - 1); }
  double b(int i) const { return b_.at(i - 1); }
  // Smallest level gap (in units of N_{L,-}); compare against C_1.
  double min_gap() const;
  bool separated(double c1) const { return min_gap() >= c1; }

private:
  std::vector<double> mu_, counts_, a_, b_;
};

struct WeightGroups {
  int I = 0;
  std::vector<double> x;        // group weight, strictly decreasing
  std::vector<double> theta;    // mass fractions, sum 1
  double rho = 0.0;             // (L,-) slots over all slots
  std::vector<std::vector<int>> J; // level indices per group, consecutive
  std::vector<int> d;           // d_1 < ... < d_I, plus d_{I+1} = s + 1
  // psi[p-1][j] = group (1-based) of slot j in segment p, 0 if not (L,-)
  std::vector<std::vector<int>> psi;
  double x_top() const { return x.front(); }
};
WeightGroups group_weights(const AsymptoticModel& model, const PiecewiseBoundary& boundary);

struct Band {
  double beta, gamma;
};
struct BandMeasure {
  int group = 0;
  std::vector<Band> bands; // index k = 0..d_{i+1}-d_i-1; beta decreases in k
  double total_length() const;
  // [min beta, max gamma]
  std::pair<double, double> support() const;
};
BandMeasure band_measure(const PiecewiseBoundary& boundary, const WeightGroups& groups, int i);

// prod_k (t - beta_k)/(t - gamma_k)
cplx phi(const BandMeasure& band, cplx t);
template <int N>
Jet<N> phi(const BandMeasure& band, const Jet<N>& t) {
  Jet<N> r{cplx(1.0)};
  for (const auto& b : band.bands) r *= (t - Jet<N>(cplx(b.beta))) / (t - Jet<N>(cplx(b.gamma)));
  return r;
}
// Numerator and denominator of phi as polynomials in t.
std::pair<Poly, Poly> phi_polys(const BandMeasure& band);

// Real branches are the intervals cut by the gammas: branch 0 is
// (-inf, gamma_min), branch d is (gamma_max, inf). Phi decreases on each.
constexpr int kPrincipalBranch = -1;
// Solves phi(t) = z. With kPrincipalBranch, continues the root from t = inf
// at z = 1 along the segment [1, z]; otherwise z must be real and the root is
// bracketed on the requested interval.
cplx solve_t(const BandMeasure& band, cplx z, int branch = kPrincipalBranch);

// Occupancy limits gamma_i, eta_i at an observation point: (L,-) slots of
// group i (resp. groups > i) right of the column, over all slots.
struct Occupancy {
  std::vector<double> gamma, eta;
};
Occupancy occupancy(const AsymptoticModel& model, const WeightGroups& groups, const ObservationPoint& obs);

// F^{(i)} written in the variable t (z = phi_i(t)):
//   G(t) = P_A(phi(t)) + alpha P_B(phi(t)) + rho theta_i t
// where P_A, P_B are pole sums in z. Affine in alpha for a fixed segment.
struct GroupFunction {
  int group = 0;
  int pt = 1;
  BandMeasure band;
  PoleSum A, B;
  double rho_theta = 0.0;

  PoleSum at_alpha(double alpha) const;
  cplx operator()(cplx t, double alpha) const;
  template <int N>
  Jet<N> operator()(const Jet<N>& t, double alpha) const {
    const Jet<N> z = phi(band, t);
    return A(z) + Jet<N>(cplx(alpha)) * B(z) + Jet<N>(cplx(rho_theta)) * t;
  }
};
GroupFunction group_function(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                             const WeightGroups& groups, int i, int pt);

// F^{(i)}(z) on the principal branch of t(z).
cplx f_piecewise(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups, int i,
                 const ObservationPoint& obs, cplx z);

// m = 1: J_i as a pole sum in phi, J_i(t) = P_J(phi_i(t)).
PoleSum j_function(const AsymptoticModel& model, const WeightGroups& groups, int i);

// Singular parameters t of component i on the real line.
std::vector<double> component_singularities(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                            const WeightGroups& groups, int i);
std::vector<double> component_grid(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                   const WeightGroups& groups, int i, int per_interval = 2000);

// Component C_i. For m = 1 uses chi = -rho theta/J', kappa = rho theta t -
// rho theta J/J'; otherwise the double-root system in (kappa, alpha).
// Branch tag = group index. chi outside [V_0, V_m] is dropped.
ParametricCurve trace_component(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                const WeightGroups& groups, int i, const std::vector<double>& grid);
// The double-root route for any m (used to cross-check the closed form).
ParametricCurve trace_component_general(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                                        const WeightGroups& groups, int i, const std::vector<double>& grid);

// Smallest distance between samples of two curves.
double curve_distance(const ParametricCurve& a, const ParametricCurve& b);
struct Box {
  double chi_min, chi_max, kappa_min, kappa_max;
};
Box bounding_box(const ParametricCurve& c);

// Predicted rank |J_1| |Xi| (i = 1) or |J_i|, and the count of distinct
// singular parameters of J_i on the projective line.
struct RankCheck {
  int predicted = 0;
  int counted = 0;
};
RankCheck component_rank(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups,
                         int i);

// Conjugate pairs among the roots of F^{(i)}(z) = kappa, from the cleared
// form z prod(A - rho theta gamma_k) = prod(A - rho theta beta_k).
int piecewise_nonreal_pairs(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                            const WeightGroups& groups, int i, const ObservationPoint& obs, double kappa);

// Limit density at kappa: -(1/pi) sum over groups right of the column of
// arg phi_i(t_i), t_i solving G_i(t) = kappa + i delta, delta -> 0.
double density_piecewise(const AsymptoticModel& model, const PiecewiseBoundary& boundary, const WeightGroups& groups,
                          const ObservationPoint& obs, double kappa);
double piecewise_mass(const AsymptoticModel& model, const WeightGroups& groups, const ObservationPoint& obs);

// k-th moment of the limit measure: sum over groups of the contour integral
// around z = 1, computed in t on a circle enclosing every finite singularity.
MomentResult piecewise_moment(const AsymptoticModel& model, const PiecewiseBoundary& boundary,
                              const WeightGroups& groups, const ObservationPoint& obs, int k);

// Schur function through the coset sum over column-to-group assignments.
// x: base weights (grouped by equal value); u: per-variable ratios so the
// variables are w_a = u_a x_a (empty means all ones). Dominant keeps only
// the assignment giving the largest weight the largest exponents.
enum class CosetMode { Full, Dominant };
double coset_schur(const Partition& lambda, const std::vector<double>& x, const std::vector<double>& u,
                   CosetMode mode);

} // namespace railyard
