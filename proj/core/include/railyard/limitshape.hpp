#pragma once

#include "railyard/model.hpp"
#include "railyard/numeric.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace railyard {

// Q'_{p_t,alpha}(u), evaluated term by term. Any M >= 1.
cplx q_prime(const AsymptoticModel& model, const ObservationPoint& obs, int M, cplx u);
// W_{p_t,alpha}(u).
cplx w_eval(const AsymptoticModel& model, const ObservationPoint& obs, cplx u);
// F(z) = z (Q'(z) + W(z)).
cplx f_eval(const AsymptoticModel& model, const ObservationPoint& obs, int M, cplx z);

// F as c_0 + sum c_k z/(z - p_k). M in {1, 2} (real poles only).
PoleSum f_function(const AsymptoticModel& model, const ObservationPoint& obs, int M);
// The affine split F = A + alpha B within segment p_t.
struct AffineF {
  PoleSum A, B;
};
AffineF f_affine(const AsymptoticModel& model, int pt, int M);

// Distinct (L,-) weights of segments >= p_t carrying a nonzero coefficient:
// the poles the moment contour encloses.
std::vector<double> contour_poles(const AsymptoticModel& model, const ObservationPoint& obs);
// All singular points of F, complex for M >= 3.
std::vector<cplx> f_singularities(const AsymptoticModel& model, const ObservationPoint& obs, int M);

struct MomentResult {
  double value = 0.0;
  double self_error = 0.0; // change under node doubling
  int nodes = 0;
};
// (1/(k+1)) (1/2 pi i) contour integral of F(z)^{k+1} dz/z around the
// contour poles.
MomentResult moment(const AsymptoticModel& model, const ObservationPoint& obs, int M, int k);

// Density of the limit counting measure at kappa, by Stieltjes inversion
// with branch continuation from kappa + i*infinity. M in {1, 2}.
double density(const AsymptoticModel& model, const ObservationPoint& obs, int M, double kappa);
// Total mass of the limit measure: sum of the contour-pole coefficients.
double limit_mass(const AsymptoticModel& model, const ObservationPoint& obs, int M);

// Integral of a density over its support inside [lo, hi]. A uniform scan
// splits the range into empty, saturated (equal to 1 within 1e-12) and
// liquid pieces, with the cuts refined by bisection. Saturated pieces count
// their length; liquid pieces are integrated by adaptive Gauss-Kronrod after
// a cosine change of variable that absorbs square-root edges.
struct SupportIntegral {
  double value = 0.0;
  std::vector<std::pair<double, double>> intervals;
};
SupportIntegral integrate_on_support(const std::function<double(double)>& rho, double lo, double hi, int scan = 400,
                                     double tol = 1e-6);

// Conjugate pairs among the roots of F(z) = kappa.
int nonreal_pairs(const AsymptoticModel& model, const ObservationPoint& obs, int M, double kappa);

struct EmpiricalMoments {
  std::vector<double> mean;   // index k-1 for k = 1..k_max
  std::vector<double> stderr_; // standard error of the mean
  int samples = 0;
  int column = 0;
};
// Column moments of the counting measure (lambda_i + n_t - i)/N, i <= n_t,
// with n_t the number of (L,-) slots at or right of column t, over exact
// samples of the realized graph with empty boundaries.
EmpiricalMoments empirical_moments(const AsymptoticModel& model, int N, double chi, int k_max, int samples,
                                   std::uint64_t seed, int threads = 1);

} // namespace railyard
