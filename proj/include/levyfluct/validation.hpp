#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levyfluct/fluctuation_laws.hpp"
#include "levyfluct/risk_analytics.hpp"
#include "levyfluct/simulator.hpp"

namespace levyfluct {

// One analytic-versus-Monte-Carlo comparison. pass means the analytic
// value sits inside mc_mean +- (3 mc_se + bias_bound), with the bias term
// covering censoring and the stopping-level residual.
struct CheckRow {
  std::string name;
  double analytic = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double bias_bound = 0.0;
  double z_score = 0.0;  // (mc_mean - analytic) / mc_se
  bool pass = false;
};

struct CheckBudget {
  std::size_t n_paths = 200000;
  double step = 1e-2;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// (y, z) box with extrema constraints S <= a and I > b (ruin checks) or
// excursion floor I > -b (recovery and last-passage checks)
struct Box4 {
  double y_lo, y_hi, z_lo, z_hi, a, b;
};

class Validator {
 public:
  explicit Validator(LevyModel model);

  CheckRow ruin_probability_check(double x, const CheckBudget& bg) const;
  CheckRow duration_check(double x, double beta, const CheckBudget& bg) const;
  CheckRow first_passage_check(double q, double x,
                               const CheckBudget& bg) const;
  CheckRow recovery_transform_check(double q, double beta, double x,
                                    const CheckBudget& bg) const;
  CheckRow last_passage_transform_check(double q, double beta, double x,
                                        const CheckBudget& bg) const;

  // quadrature of the constrained joint law over the box against the MC
  // frequency of the same event
  CheckRow ruin_box_check(double q, double x, const Box4& box,
                          const CheckBudget& bg) const;
  CheckRow recovery_box_check(double q, double beta, double x,
                              const Box4& box, const CheckBudget& bg) const;
  CheckRow last_passage_box_check(double q, double beta, double x,
                                  const Box4& box,
                                  const CheckBudget& bg) const;

  // the model-appropriate default set; box checks only run when the model
  // has a jump part
  std::vector<CheckRow> suite(const CheckBudget& bg) const;

  const LevyModel& model() const { return model_; }

 private:
  CheckRow compare(std::string name, double analytic, double x,
                   const WeightSpec& w, const CheckBudget& bg) const;

  LevyModel model_;
  Simulator sim_;
  LawEngine engine_;
  RiskEngine risk_;
};

}  // namespace levyfluct
