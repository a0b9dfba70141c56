#pragma once

#include "railyard/model.hpp"
#include "railyard/numeric.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace railyard {

struct CurveSample {
  double u;
  double chi;
  double kappa;
  int branch;
  // position inside the segment when known; chi alone loses it near poles
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

// Sampled frozen boundary. Samples of one branch are stored in parameter
// order; a gap (singular parameter skipped) starts a new polyline piece.
struct ParametricCurve {
  std::vector<CurveSample> samples;
  std::vector<std::size_t> breaks; // indices where a new piece starts

  std::vector<std::vector<CurveSample>> pieces() const;
};

struct DualPoint {
  double chi_v;
  double kappa_v;
};

// U(u) = sum_{R+} zeta u/(u + 1/x) - sum_{L+} zeta u/(u - 1/x) and
// V(u) = sum_{L-} (1/n) u/(u - x), as pole sums. m = 1 only.
struct UV {
  PoleSum U, V;
};
UV uv_functions(const AsymptoticModel& model);
// Pointwise values; throws InvalidInput at a singular u.
std::pair<double, double> uv_values(const AsymptoticModel& model, double u);

// chi = V'/(V' - U'), kappa = chi U + (1 - chi) V on the grid.
ParametricCurve trace_m1(const AsymptoticModel& model, const std::vector<double>& u_grid);
// Point of trace_m1 at a single nonsingular u.
CurveSample curve_point_m1(const AsymptoticModel& model, double u);

// ((U - V)/V, -1/V).
DualPoint dual(const AsymptoticModel& model, double u);
// Tangent-line coordinates of a parametric point from its derivatives:
// chi^v = k'/(k c' - c k'), kappa^v = c'/(c k' - k c').
DualPoint dual_transform(double c, double k, double dc, double dk);
// Dual of the dual curve at u, recovering (chi, kappa).
std::pair<double, double> double_dual(const AsymptoticModel& model, double u);

// Solves F = kappa, dF/du = 0 for (kappa, alpha) in each segment p_t at
// every grid point; keeps alpha in [0,1] up to 1e-9. Branch tag = p_t.
// M in {1, 2}.
ParametricCurve trace_double_root(const AsymptoticModel& model, const std::vector<double>& u_grid, int M);

// Largest of |F(u) - kappa| and |F'(u)| at a traced sample, each divided by
// the magnitude of its A and alpha*B parts when that exceeds 1.
double double_root_residual(const AsymptoticModel& model, const CurveSample& s, int M);

// Singular parameters of the frozen-boundary parametrization: all real
// poles of F for every segment.
std::vector<double> curve_singularities(const AsymptoticModel& model, int M);
std::vector<double> default_grid(const AsymptoticModel& model, int M, int per_interval = 2000);

struct TangencyReport {
  int count_chi0 = 0;
  int count_chi1 = 0;
  int rank = 0;
  // max |chi| (resp. |1 - chi|) at parameter distance 1e-6 from each pole
  // of U (resp. V), on both sides
  double chi0_limit = 0.0;
  double chi1_limit = 0.0;
  bool limits_ok = false;
};
TangencyReport tangency_report(const AsymptoticModel& model);

struct WindingReport {
  int lines = 0;
  int failures = 0;
  int rank = 0;
  int min_finite = 0;   // fewest finite solutions seen over the random lines
  int at_xi_inf = 0;    // finite solutions when c = xi_infinity
  bool passed = false;
};
// Intersections of the dual curve with random lines chi^v = c kappa^v + d,
// counted by bracketing c = (d + 1) V(u) - U(u) between singularities.
WindingReport winding_check(const AsymptoticModel& model, int line_samples, std::uint64_t seed);

} // namespace railyard
