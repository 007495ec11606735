#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "levyfluct/levy_model.hpp"
#include "levyfluct/scale_functions.hpp"

namespace levyfluct {

// Exit, recovery and last-passage identities of a spectrally negative
// model, all expressed through scale functions. Notation used in the
// contracts below: T is the first passage below 0 (ruin), T0 the first
// return to 0 after T (recovery), l the last time below 0, S / I running
// supremum and infimum, y the surplus X(T-) just before ruin, z = |X(T)|
// the deficit at ruin. Densities are jump-ruin densities in (y, z); the
// creeping mass (ruin by diffusion, y = z = 0) is carried separately by
// the *_creeping transforms.
//
// Scale evaluators are constructed lazily per (q) and per tilt pair and
// cached for the engine's lifetime; const members are thread-safe.
class LawEngine {
 public:
  explicit LawEngine(LevyModel m,
                     ScaleEvaluator::Backend backend = ScaleEvaluator::Backend::Auto,
                     InversionParams params = {});

  const LevyModel& model() const { return model_; }
  const ScaleEvaluator& scale(double q) const;
  // Evaluator of the c-tilted model at level p (p + phi(c) >= 0 in every
  // sanctioned use; anything below the tilted exponent's minimum throws).
  const ScaleEvaluator& tilted_scale(double c, double p) const;

  // resolvent density of the process killed on exiting [0, inf):
  // u^{(q)}(x, y) = W^{(q)}(x) e^{-Phi(q) y} - W^{(q)}(x - y)
  double potential_density(double q, double x, double y) const;

  // joint density of (surplus, deficit) at ruin under e^{-qT} discounting
  double ruin_triple_density(double q, double x, double y, double z) const;
  // marginal in the surplus: jump tail times the resolvent
  double ruin_surplus_marginal(double q, double x, double y) const;
  // ratio of the triple density at x to the one at 0 (bounded variation
  // only); collapses to a scale-function expression independent of (y, z)
  // beyond the surplus branch
  double ruin_triple_ratio(double q, double x, double y) const;

  // joint transform of first passage below y and the position there,
  // E_x[exp(-alpha T_y + beta X(T_y))], x > y
  double first_passage_transform(double x, double y, double alpha,
                                 double beta) const;

  // ruin density constrained by pre-ruin extrema: I(T-) > b, S(T-) <= a
  double ruin_joint_extrema_density(double q, double x, double y, double z,
                                    double a, double b) const;
  double ruin_joint_infimum_density(double q, double x, double y, double z,
                                    double b) const;   // only I(T-) > b
  double ruin_joint_supremum_density(double q, double x, double y, double z,
                                     double a) const;  // only S(T-) <= a
  // density in the infimum itself: I(T-) in db
  double ruin_infimum_marginal_density(double q, double x, double y, double z,
                                       double b) const;

  // ruin-and-recovery law: discount e^{-qT - beta(T0-T)}, excursion floor
  // I(T0) > -b, cap S(T0) <= a
  double recovery_joint_density(double q, double beta, double x, double y,
                                double z, double a, double b) const;
  // a, b limits removed
  double recovery_triple_density(double q, double beta, double x, double y,
                                 double z) const;
  // E_x[exp(-qT - beta(T0-T)); T0 < inf]
  double recovery_transform(double q, double beta, double x) const;
  // part of the recovery transform carried by creeping ruin (diffusion
  // crossing, y = z = 0); zero when sigma = 0
  double creeping_recovery_transform(double q, double beta, double x) const;

  // ruin-to-last-passage law: discount e^{-qT - beta(l-T)}, extrema up to l
  double last_passage_joint_density(double q, double beta, double x, double y,
                                    double z, double a, double b) const;
  double last_passage_triple_density(double q, double beta, double x, double y,
                                     double z) const;
  double last_passage_transform(double q, double beta, double x) const;
  double creeping_last_passage_transform(double q, double beta,
                                         double x) const;

  // E_x[exp(-beta D)] with D the total time spent below 0; needs positive
  // mean drift
  double negative_duration_transform(double beta, double x) const;

  // mass of exp(-Phi(beta) z) against the recovery triple density,
  // integrated over all (y, z); the jump-ruin complement of the creeping
  // transforms
  double jump_recovery_mass(double q, double beta, double x) const;

 private:
  LevyModel model_;
  ScaleEvaluator::Backend backend_;
  InversionParams params_;
  mutable std::map<double, std::unique_ptr<ScaleEvaluator>> scales_;
  mutable std::map<std::pair<double, double>, std::unique_ptr<ScaleEvaluator>>
      tilted_;
  mutable std::mutex mu_;
};

}  // namespace levyfluct
