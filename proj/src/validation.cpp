#include "levyfluct/validation.hpp"

#include <cmath>
#include <utility>

#include "levyfluct/quadrature.hpp"

namespace levyfluct {

namespace {

SimPlan plan_from(const CheckBudget& bg) {
  SimPlan plan;
  plan.n_paths = bg.n_paths;
  plan.seed = bg.seed;
  plan.step = bg.step;
  plan.threads = bg.threads;
  return plan;
}

}  // namespace

Validator::Validator(LevyModel model)
    : model_(std::move(model)),
      sim_(model_),
      engine_(model_),
      risk_(model_) {}

CheckRow Validator::compare(std::string name, double analytic, double x,
                            const WeightSpec& w, const CheckBudget& bg) const {
  const EstimateResult r = sim_.estimate(x, plan_from(bg), w);
  CheckRow row;
  row.name = std::move(name);
  row.analytic = analytic;
  row.mc_mean = r.mean;
  row.mc_se = r.std_error;
  row.bias_bound = r.bias_bound;
  row.z_score = r.std_error > 0.0 ? (r.mean - analytic) / r.std_error : 0.0;
  row.pass =
      std::abs(r.mean - analytic) <= 3.0 * r.std_error + r.bias_bound;
  return row;
}

CheckRow Validator::ruin_probability_check(double x,
                                           const CheckBudget& bg) const {
  WeightSpec w{WeightKind::DiscountedRuin, 0.0, 0.0, {}};
  return compare("ruin_prob_x" + std::to_string(x).substr(0, 4),
                 risk_.ruin_probability(x), x, w, bg);
}

CheckRow Validator::duration_check(double x, double beta,
                                   const CheckBudget& bg) const {
  // from zero the transform collapses to drift times Phi(beta)/beta
  const double analytic =
      x == 0.0 ? mean_drift(model_) * phi_inverse(model_, beta) / beta
               : engine_.negative_duration_transform(beta, x);
  WeightSpec w{WeightKind::DurationTransform, 0.0, beta, {}};
  return compare("duration_x" + std::to_string(x).substr(0, 4), analytic, x,
                 w, bg);
}

CheckRow Validator::first_passage_check(double q, double x,
                                        const CheckBudget& bg) const {
  WeightSpec w{WeightKind::DiscountedRuin, q, 0.0, {}};
  return compare("first_passage", engine_.first_passage_transform(x, 0.0, q, 0.0),
                 x, w, bg);
}

CheckRow Validator::recovery_transform_check(double q, double beta, double x,
                                             const CheckBudget& bg) const {
  WeightSpec w{WeightKind::DiscountedRecovery, q, beta, {}};
  return compare("recovery_transform", engine_.recovery_transform(q, beta, x),
                 x, w, bg);
}

CheckRow Validator::last_passage_transform_check(double q, double beta,
                                                 double x,
                                                 const CheckBudget& bg) const {
  WeightSpec w{WeightKind::DiscountedLastPassage, q, beta, {}};
  return compare("last_passage_transform",
                 engine_.last_passage_transform(q, beta, x), x, w, bg);
}

CheckRow Validator::ruin_box_check(double q, double x, const Box4& box,
                                   const CheckBudget& bg) const {
  auto density = [&](double y, double z) {
    return engine_.ruin_joint_extrema_density(q, x, y, z, box.a, box.b);
  };
  auto over_z = [&](double y) {
    return integrate([&](double z) { return density(y, z); }, box.z_lo,
                     box.z_hi, 1e-9)
        .value;
  };
  const double analytic = integrate(over_z, box.y_lo, box.y_hi, 1e-8).value;

  WeightSpec w{WeightKind::DiscountedRuin, q, 0.0, {}};
  w.box.y_lo = box.y_lo;
  w.box.y_hi = box.y_hi;
  w.box.z_lo = box.z_lo;
  w.box.z_hi = box.z_hi;
  w.box.sup_cap = box.a;
  w.box.inf_floor = box.b;
  return compare("ruin_box", analytic, x, w, bg);
}

CheckRow Validator::recovery_box_check(double q, double beta, double x,
                                       const Box4& box,
                                       const CheckBudget& bg) const {
  auto density = [&](double y, double z) {
    return engine_.recovery_joint_density(q, beta, x, y, z, box.a, box.b);
  };
  auto over_z = [&](double y) {
    return integrate([&](double z) { return density(y, z); }, box.z_lo,
                     box.z_hi, 1e-9)
        .value;
  };
  const double analytic = integrate(over_z, box.y_lo, box.y_hi, 1e-8).value;

  WeightSpec w{WeightKind::DiscountedRecovery, q, beta, {}};
  w.box.y_lo = box.y_lo;
  w.box.y_hi = box.y_hi;
  w.box.z_lo = box.z_lo;
  w.box.z_hi = box.z_hi;
  w.box.sup_cap = box.a;
  w.box.inf_floor = -box.b;  // excursion floor sits below zero
  return compare("recovery_box", analytic, x, w, bg);
}

CheckRow Validator::last_passage_box_check(double q, double beta, double x,
                                           const Box4& box,
                                           const CheckBudget& bg) const {
  auto density = [&](double y, double z) {
    return engine_.last_passage_joint_density(q, beta, x, y, z, box.a, box.b);
  };
  auto over_z = [&](double y) {
    return integrate([&](double z) { return density(y, z); }, box.z_lo,
                     box.z_hi, 1e-9)
        .value;
  };
  const double analytic = integrate(over_z, box.y_lo, box.y_hi, 1e-8).value;

  WeightSpec w{WeightKind::DiscountedLastPassage, q, beta, {}};
  w.box.y_lo = box.y_lo;
  w.box.y_hi = box.y_hi;
  w.box.z_lo = box.z_lo;
  w.box.z_hi = box.z_hi;
  w.box.sup_cap = box.a;
  w.box.inf_floor = -box.b;
  return compare("last_passage_box", analytic, x, w, bg);
}

std::vector<CheckRow> Validator::suite(const CheckBudget& bg) const {
  std::vector<CheckRow> rows;
  rows.push_back(ruin_probability_check(0.0, bg));
  rows.push_back(ruin_probability_check(1.0, bg));
  if (model_.sigma == 0.0) {
    // the occupation-time estimator interpolates crossings between grid
    // points, which biases diffusion paths at order sqrt(step). The
    // suite keeps its fixed budget honest by confronting the duration
    // transform only where the sampler is exact; duration_check stays
    // available for diffusion models at caller-chosen budgets
    rows.push_back(duration_check(0.0, 0.5, bg));
    rows.push_back(duration_check(1.0, 0.5, bg));
  }
  rows.push_back(first_passage_check(0.1, 1.0, bg));
  rows.push_back(recovery_transform_check(0.1, 0.2, 1.0, bg));
  rows.push_back(last_passage_transform_check(0.1, 0.3, 1.0, bg));
  if (std::holds_alternative<CompoundPoisson>(model_.jumps)) {
    rows.push_back(
        ruin_box_check(0.1, 1.0, {0.2, 1.0, 0.2, 1.0, 3.0, 0.1}, bg));
    rows.push_back(recovery_box_check(
        0.1, 0.2, 2.0, {1.6, 2.8, 0.1, 1.2, 3.0, 1.5}, bg));
    rows.push_back(last_passage_box_check(
        0.1, 0.3, 2.0, {1.1, 2.5, 0.1, 0.9, 4.0, 1.0}, bg));
  }
  return rows;
}

}  // namespace levyfluct
