#pragma once

#include <complex>
#include <variant>
#include <vector>

namespace levyfluct {

using cplx = std::complex<double>;

// --- claim-size distributions for the compound Poisson jump part ---

struct ExpClaims {
  double eta = 1.0;
};

// Density sum_i w_i eta_i exp(-eta_i u). Weights sum to 1; individual weights
// may be negative (matrix-exponential style fits) as long as the density
// stays nonnegative. Rates must be distinct or the partial-fraction scale
// function backend degenerates.
struct MixedExpClaims {
  std::vector<double> weights;
  std::vector<double> rates;
};

// Piecewise-linear density on [knots.front(), knots.back()], zero outside.
// `tilt` applies a multiplicative exp(-tilt*u) reweighting (Esscher change of
// measure); `norm` keeps the tilted density integrating to one.
struct TableClaims {
  std::vector<double> knots;
  std::vector<double> density;
  double tilt = 0.0;
  double norm = 1.0;
};

using ClaimDist = std::variant<ExpClaims, MixedExpClaims, TableClaims>;

struct NoJumps {};
struct CompoundPoisson {
  double rate = 1.0;  // Poisson intensity of downward jumps
  ClaimDist claims = ExpClaims{};
};
using JumpSpec = std::variant<NoJumps, CompoundPoisson>;

// Spectrally negative Levy process X(t) = x + drift*t + sigma*B(t) - sum of
// claims, with Laplace exponent
//
//   phi(a) = drift*a + sigma^2 a^2 / 2 + rate*(claim_lt(a) - 1),
//
// strictly convex with phi(0) = 0. Processes with monotone (non-increasing)
// paths are rejected: sigma == 0 requires drift > 0 and some jump activity
// or none at all is meaningless, see validate().
struct LevyModel {
  double drift = 0.0;
  double sigma = 0.0;
  JumpSpec jumps = NoJumps{};

  // Throws std::invalid_argument naming the broken invariant.
  void validate() const;
};

enum class Variation { Bounded, Unbounded };

// --- claim distribution helpers ---

double claim_density(const ClaimDist& d, double u);
double claim_tail(const ClaimDist& d, double u);  // P(claim > u)
double claim_mean(const ClaimDist& d);
// E exp(-s * claim); defined for s above the negative of the density's decay
// rate. Real and complex overloads share the same branch structure.
double claim_lt(const ClaimDist& d, double s);
cplx claim_lt(const ClaimDist& d, cplx s);
// claim_lt(s) - 1, computed without cancellation near s = 0.
double claim_lt_m1(const ClaimDist& d, double s);
double claim_lt_deriv(const ClaimDist& d, double s);
ClaimDist tilt_claims(const ClaimDist& d, double c);

// --- model-level quantities ---

double laplace_exponent(const LevyModel& m, double alpha);  // alpha >= 0
// Analytic extension of phi over the strip (exponent_domain_lo, inf); used
// internally where tilted quantities need phi at negative arguments.
double laplace_exponent_analytic(const LevyModel& m, double alpha);
cplx laplace_exponent(const LevyModel& m, cplx s);
// Extended-precision variant for the transform-inversion contour, where the
// node sum cancels by a factor of exp(2M/5) and double round-off would
// dominate the result.
std::complex<long double> laplace_exponent_ld(const LevyModel& m,
                                              std::complex<long double> s);
double laplace_exponent_deriv(const LevyModel& m, double alpha);
cplx laplace_exponent_deriv(const LevyModel& m, cplx s);
double laplace_exponent_second(const LevyModel& m, double alpha);

double mean_drift(const LevyModel& m);  // phi'(0+) = drift - rate * mean claim
Variation variation_class(const LevyModel& m);
// Drift coefficient b of a bounded-variation path (equals `drift` in this
// parametrization). Throws std::domain_error for unbounded variation.
double drift_coefficient_b(const LevyModel& m);

// Exponential tilt: the measure change with density exp(c X(t) - phi(c) t).
// The tilted process is again spectrally negative with exponent
// phi_c(a) = phi(a + c) - phi(c). Requires c >= 0.
LevyModel tilt(const LevyModel& m, double c);

double jump_rate(const LevyModel& m);                        // 0 if no jumps
double jump_measure_density(const LevyModel& m, double size);  // rate * p(size)
double jump_measure_tail(const LevyModel& m, double size);     // rate * P(claim > size)

// Largest alpha >= 0 with phi(alpha) = q. Requires q >= 0. Equals 0 iff
// q == 0 and phi'(0+) >= 0.
double phi_inverse(const LevyModel& m, double q);
// Largest real root of phi = level over the full analytic strip. Handles
// level < 0, which arises for scale functions of tilted models. Throws
// std::domain_error when phi stays above `level` everywhere.
double phi_inverse_extended(const LevyModel& m, double level);
// d/dq of phi_inverse, i.e. 1 / phi'(phi_inverse(q)).
double phi_inverse_deriv(const LevyModel& m, double q);
// Left endpoint of the strip on which phi is finite (a pole of the claim
// transform, or -inf when there is none).
double exponent_domain_lo(const LevyModel& m);

bool has_rational_exponent(const LevyModel& m);

}  // namespace levyfluct
