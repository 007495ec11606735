#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "levyfluct/levy_model.hpp"
#include "levyfluct/rng.hpp"
#include "levyfluct/scale_functions.hpp"

namespace levyfluct {

// Everything one simulated path reports about its ruin history. Times use
// an infinity sentinel when the event never happened; extrema snapshots
// freeze the running supremum and infimum at the matching event time, so
// each law can be checked against the window it actually describes.
struct PathFunctionals {
  bool ruined = false;
  bool creeping = false;  // ruin by the diffusion part, deficit zero
  bool censored = false;  // horizon ended before every functional settled

  double T = std::numeric_limits<double>::infinity();  // ruin time
  double surplus = 0.0;   // X(T-), position just before ruin
  double deficit = 0.0;   // |X(T)|, zero when creeping
  double sup_T = 0.0;     // running sup just before T
  double inf_T = 0.0;     // running inf just before T

  double T0 = std::numeric_limits<double>::infinity();  // recovery time
  double sup_T0 = 0.0;    // running sup at T0
  double inf_T0 = 0.0;    // running inf at T0 (the excursion floor)

  double l = 0.0;         // last time below zero seen in the window
  double sup_l = 0.0;     // running sup at l
  double inf_l = 0.0;     // running inf at l

  double D = 0.0;         // total time spent below zero
};

// How to run a batch of paths. Exactly one horizon rule applies: with
// t_max > 0 the path is cut at t_max and unresolved functionals are marked
// censored; otherwise the path runs until it clears the level L chosen so
// that the probability of ever returning below zero from L stays under
// level_bound (requires positive mean drift, which makes the stopping time
// almost surely finite).
struct SimPlan {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  double t_max = 0.0;
  double level_bound = 1e-4;
  double step = 1e-3;   // Euler step for the diffusion part
  bool bridge = true;   // Brownian-bridge extrema/crossing correction
  unsigned threads = 1;
};

// Indicator box over the path functionals a law constrains: surplus prior
// to ruin, deficit, and the extrema snapshot the weight kind selects.
// Defaults leave every side unconstrained.
struct EventBox {
  double y_lo = 0.0;
  double y_hi = std::numeric_limits<double>::infinity();
  double z_lo = 0.0;
  double z_hi = std::numeric_limits<double>::infinity();
  double sup_cap = std::numeric_limits<double>::infinity();   // S <= cap
  double inf_floor = -std::numeric_limits<double>::infinity();  // I > floor
};

// The closed weight vocabulary of the validation suite. Extrema snapshots
// used by the box: at T for DiscountedRuin, at T0 for DiscountedRecovery,
// at l for DiscountedLastPassage. DurationTransform weighs every path by
// exp(-beta D) with no event.
enum class WeightKind {
  DiscountedRuin,          // exp(-q T) 1(ruin, box)
  DiscountedRecovery,      // exp(-q T - beta (T0 - T)) 1(recovered, box)
  DiscountedLastPassage,   // exp(-q T - beta (l - T)) 1(ruin, box)
  DurationTransform,       // exp(-beta D)
};

struct WeightSpec {
  WeightKind kind = WeightKind::DiscountedRuin;
  double q = 0.0;
  double beta = 0.0;
  EventBox box;
};

struct EstimateResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;     // paths with a nonzero contribution
  double censored_fraction = 0.0;
  // one-sided bound on what censored paths could still have added to the
  // mean, plus the level-rule residual where that rule was used
  double bias_bound = 0.0;
};

// Monte Carlo oracle for the analytic laws. Paths with sigma = 0 are
// simulated exactly event by event (linear rise between exponential jump
// times); a diffusion part is filled in on an Euler grid between jumps,
// with Brownian-bridge corrections for barrier crossings and extrema
// inside a step. Estimates are deterministic for a fixed (seed, plan):
// per-path streams are indexed by path id and the reduction runs over
// fixed-size blocks in index order regardless of thread count.
class Simulator {
 public:
  explicit Simulator(LevyModel m);

  const LevyModel& model() const { return model_; }

  PathFunctionals simulate_path(double x, const SimPlan& plan,
                                std::uint64_t path_id) const;

  EstimateResult estimate(double x, const SimPlan& plan,
                          const WeightSpec& weight) const;

  // smallest level with ruin probability under the bound; the stopping
  // level of the adaptive horizon rule
  double adaptive_level(double bound) const;

 private:
  struct Block;
  PathFunctionals run_one(double x, const SimPlan& plan, double level,
                          std::uint64_t path_id) const;
  void run_block(double x, const SimPlan& plan, const WeightSpec& weight,
                 double level, std::size_t lo, std::size_t hi,
                 Block& out) const;

  LevyModel model_;
  std::unique_ptr<ScaleEvaluator> w0_;  // undiscounted scale, level rule
};

}  // namespace levyfluct
