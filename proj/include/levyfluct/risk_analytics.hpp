#pragma once

#include <functional>
#include <vector>

#include "levyfluct/fluctuation_laws.hpp"
#include "levyfluct/levy_model.hpp"
#include "levyfluct/scale_functions.hpp"

namespace levyfluct {

// Penalty applied at ruin. The weight w sees, in order, the surplus just
// before ruin y, the deficit z, the pre-ruin supremum a and the pre-ruin
// infimum b. Truncation bounds at zero are filled in from the model's
// decay rates (claim tail times e^{-Phi(q) .}).
//
// When the weight factors as w = wyab(y, a, b) * wz(z), declaring the
// factors lets the integrator hoist the deficit integral out of the
// extrema quadrature, which cuts the cost by the number of deficit nodes
// (easily two orders of magnitude). Set both factors or neither; all
// built-in penalties declare them. w itself must always be set and stay
// consistent with the factors.
struct PenaltySpec {
  std::function<double(double y, double z, double a, double b)> w;
  std::function<double(double y, double a, double b)> wyab;
  std::function<double(double z)> wz;
  double y_max = 0.0;
  double z_max = 0.0;
  double rel_tol = 1e-4;
};

PenaltySpec unit_penalty();
PenaltySpec deficit_power_penalty(double k);
PenaltySpec band_penalty(double y_lo, double y_hi, double z_lo, double z_hi);
PenaltySpec exp_deficit_penalty(double s);

struct GSResult {
  double value = 0.0;
  double jump_part = 0.0;
  double creeping_part = 0.0;  // zero without a Gaussian part
  double error_estimate = 0.0;
};

// Which five-term kernel the penalty integral uses. The two variants
// differ in the last term only: Derived carries the W(x-b) factor that
// differentiating the two-sided exit law in a and b produces, while
// RepeatedFactor keeps a second W'(a-b) in its place. Only the Derived
// sum decays along a; with the repeated factor the five terms stop
// cancelling, the sum tends to a nonzero constant, and the a-integral
// diverges, so gerber_shiu reports non-convergence for that variant.
// Use kernel_crosscheck to compare the two pointwise against a
// finite-difference oracle.
enum class GSKernelForm { Derived, RepeatedFactor };

// One row of the kernel cross-check report: both kernel sums and the
// mixed-partial finite difference of the exit law they should equal.
struct KernelCheckRow {
  double y = 0.0, a = 0.0, b = 0.0;
  double repeated = 0.0;
  double derived = 0.0;
  double fd_oracle = 0.0;
};

// Insurance-facing layer on top of the fluctuation laws: discounted
// penalty integrals, surplus-prior-to-ruin densities in tilted-survival
// form, plain ruin probabilities.
class RiskEngine {
 public:
  explicit RiskEngine(LevyModel m,
                      ScaleEvaluator::Backend backend = ScaleEvaluator::Backend::Auto,
                      InversionParams params = {});

  const LevyModel& model() const { return model_; }
  const LawEngine& laws() const { return laws_; }

  // E_x[e^{-qT} w(y, z, a, b); T < inf] by iterated adaptive quadrature
  // (innermost to outermost: b, a, z, y). Needs positive mean drift and a
  // model whose scale function has closed-form second derivatives.
  // Without a Gaussian part the pre-ruin extrema laws carry atoms at a = y
  // and b = x (ruin off a record high, ruin without dipping under the
  // start); their line and corner masses are integrated alongside the
  // smooth kernel. The creeping part evaluates w at (0, 0, x, 0), the
  // Dirac atom a diffusion crossing puts at surplus 0, deficit 0,
  // supremum x, infimum 0.
  GSResult gerber_shiu(double q, double x, const PenaltySpec& spec,
                       GSKernelForm form = GSKernelForm::Derived) const;

  // density of the surplus prior to ruin in tilted-survival form,
  // lambda Pbar(y) e^{Phi(q)(x-y)} / phi'(Phi(q)) times the difference of
  // tilted non-ruin probabilities; one expression covers both branches
  // since the tilted survival vanishes at negative starts. No safety
  // loading needed: the tilt always drifts up.
  double dickson_density(double q, double x, double y) const;

  // P_x(ruin ever) = 1 - phi'(0+) W(x); needs positive mean drift
  double ruin_probability(double x) const;
  // survival of the c-tilted model from x, phi_c'(0+) W_c(x) capped at one
  double tilted_nonruin(double c, double x) const;

  // informational report for the kernel discrepancy, sampled on a small
  // (y, a, b) grid around the given start; never throws on disagreement
  std::vector<KernelCheckRow> kernel_crosscheck(double q, double x) const;

 private:
  LevyModel model_;
  LawEngine laws_;
};

}  // namespace levyfluct
