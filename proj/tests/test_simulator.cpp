#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "levyfluct/errors.hpp"
#include "levyfluct/levy_model.hpp"
#include "levyfluct/simulator.hpp"

using namespace levyfluct;

namespace {

LevyModel cl_model() {
  return LevyModel{1.2, 0.0, CompoundPoisson{1.0, ExpClaims{1.0}}};
}

LevyModel jd_model() {
  return LevyModel{1.1, 0.4,
                   CompoundPoisson{0.9, MixedExpClaims{{0.4, 0.6}, {0.7, 2.0}}}};
}

LevyModel bm_model() { return LevyModel{0.3, 0.8, NoJumps{}}; }

double cl_ruin(double x) { return (5.0 / 6.0) * std::exp(-x / 6.0); }

}  // namespace

TEST_CASE("event-driven paths reproduce classical ruin values") {
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 200000;
  plan.seed = 7;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};

  for (double x : {0.0, 1.0}) {
    const auto r = sim.estimate(x, plan, ruin);
    CHECK(std::abs(r.mean - cl_ruin(x)) <=
          3.0 * r.std_error + r.bias_bound);
    CHECK(r.std_error > 0.0);
    CHECK(r.n_effective > 0);
  }
}

TEST_CASE("ruin surplus and deficit from a zero start follow the jump law") {
  // from zero the pre-ruin surplus is exponential with the dominant-root
  // rate and the deficit is the claim overshoot, so a (y, z) box has the
  // closed probability (lambda/c)(e^{-y1}-e^{-y2})(e^{-z1}-e^{-z2}) at q=0
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 400000;
  plan.seed = 11;
  WeightSpec w{WeightKind::DiscountedRuin, 0.0, 0.0, {}};
  w.box.y_lo = 0.2;
  w.box.y_hi = 1.0;
  w.box.z_lo = 0.1;
  w.box.z_hi = 0.8;

  const double want = (1.0 / 1.2) *
                      (std::exp(-0.2) - std::exp(-1.0)) *
                      (std::exp(-0.1) - std::exp(-0.8));
  const auto r = sim.estimate(0.0, plan, w);
  CHECK(std::abs(r.mean - want) <= 3.0 * r.std_error + r.bias_bound);
}

TEST_CASE("bridge correction tightens the pure-diffusion estimate") {
  Simulator sim(bm_model());
  const double want = std::exp(-2.0 * 0.3 / 0.64);
  SimPlan plan;
  plan.n_paths = 60000;
  plan.seed = 3;
  plan.step = 1e-2;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};

  const auto with = sim.estimate(1.0, plan, ruin);
  plan.bridge = false;
  const auto without = sim.estimate(1.0, plan, ruin);

  CHECK(std::abs(with.mean - want) <= 3.0 * with.std_error + with.bias_bound);
  CHECK(std::abs(with.mean - want) < std::abs(without.mean - want));
}

TEST_CASE("halving the step barely moves a jump-diffusion estimate") {
  Simulator sim(jd_model());
  SimPlan plan;
  plan.n_paths = 20000;
  plan.seed = 19;
  plan.step = 2e-2;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};

  const auto coarse = sim.estimate(1.0, plan, ruin);
  plan.step = 1e-2;
  const auto fine = sim.estimate(1.0, plan, ruin);
  CHECK(std::abs(coarse.mean - fine.mean) < 3.0 * fine.std_error);
}

TEST_CASE("estimates are reproducible and independent of worker count") {
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 20000;
  plan.seed = 23;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};

  const auto a = sim.estimate(1.0, plan, ruin);
  const auto b = sim.estimate(1.0, plan, ruin);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);

  SimPlan two = plan;
  two.threads = 2;
  const auto c = sim.estimate(1.0, two, ruin);
  CHECK(c.mean == a.mean);
  CHECK(c.std_error == a.std_error);

  SimPlan other = plan;
  other.seed = 24;
  const auto d = sim.estimate(1.0, other, ruin);
  CHECK(d.mean != a.mean);

  const auto p1 = sim.simulate_path(1.0, plan, 5);
  const auto p2 = sim.simulate_path(1.0, plan, 5);
  CHECK(p1.T == p2.T);
  CHECK(p1.deficit == p2.deficit);
  CHECK(p1.D == p2.D);
}

TEST_CASE("duration transform from zero matches the closed value") {
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 150000;
  plan.seed = 29;
  const double beta = 0.5;
  WeightSpec dur{WeightKind::DurationTransform, 0.0, beta, {}};

  const double want = 0.2 * phi_inverse(cl_model(), beta) / beta;
  const auto r = sim.estimate(0.0, plan, dur);
  CHECK(std::abs(r.mean - want) <= 3.0 * r.std_error + r.bias_bound);
}

TEST_CASE("a fixed horizon censors rather than silently resolving") {
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 30000;
  plan.seed = 31;
  plan.t_max = 2.0;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};

  const auto r = sim.estimate(1.0, plan, ruin);
  CHECK(r.censored_fraction > 0.5);
  CHECK(r.bias_bound > 0.0);
  // the estimate plus its censoring bound brackets the true value
  const double want = cl_ruin(1.0);
  CHECK(r.mean <= want + 3.0 * r.std_error);
  CHECK(r.mean + r.bias_bound + 3.0 * r.std_error >= want);
}

TEST_CASE("the adaptive level rule resolves every path") {
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 30000;
  plan.seed = 37;
  WeightSpec last{WeightKind::DiscountedLastPassage, 0.1, 0.3, {}};

  const auto r = sim.estimate(1.0, plan, last);
  CHECK(r.censored_fraction == 0.0);
  // only the level-rule residual remains in the bias bound
  CHECK(r.bias_bound == doctest::Approx(plan.level_bound).epsilon(1e-12));

  const double level = sim.adaptive_level(plan.level_bound);
  CHECK(level > 0.0);
  // the stated bound holds at the chosen level for the closed-form model
  CHECK(cl_ruin(level) <= plan.level_bound * (1.0 + 1e-6));
}

TEST_CASE("path functionals respect their definitions") {
  SimPlan plan;
  plan.seed = 41;
  plan.step = 5e-3;

  for (const auto& model : {cl_model(), jd_model()}) {
    Simulator sim(model);
    int seen = 0;
    for (std::uint64_t pid = 0; pid < 4000 && seen < 60; ++pid) {
      const auto f = sim.simulate_path(0.8, plan, pid);
      if (!f.ruined) continue;
      ++seen;
      CHECK(f.T >= 0.0);
      CHECK(f.T <= f.T0);
      CHECK(f.l >= f.T0 - 1e-9);
      CHECK(f.D >= f.T0 - f.T - 1e-9);
      CHECK(f.surplus >= 0.0);
      CHECK(f.deficit >= 0.0);
      CHECK(f.sup_T >= 0.8);
      CHECK(f.inf_T >= -1e-9);
      CHECK(f.inf_T <= 0.8 + 1e-9);
      CHECK(f.surplus <= f.sup_T + 1e-9);
      CHECK(f.sup_T0 >= f.sup_T);
      CHECK(f.inf_T0 <= -f.deficit + 1e-9);
      CHECK(f.sup_l >= f.sup_T0);
      CHECK(f.inf_l <= f.inf_T0);
      if (model.sigma == 0.0) {
        CHECK(!f.creeping);
        CHECK(f.deficit > 0.0);
      } else if (f.creeping) {
        CHECK(f.surplus == 0.0);
        CHECK(f.deficit == 0.0);
      }
    }
    CHECK(seen >= 60);
  }
}

TEST_CASE("distributions without a direct sampler fall back to inversion") {
  // triangular table density, mean 1
  LevyModel table{1.5, 0.0,
                  CompoundPoisson{0.8, TableClaims{{0.0, 1.0, 2.0},
                                                   {0.0, 1.0, 0.0}}}};
  Simulator ts(table);
  SimPlan plan;
  plan.n_paths = 100000;
  plan.seed = 43;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};
  const auto rt = ts.estimate(0.0, plan, ruin);
  CHECK(std::abs(rt.mean - 0.8 / 1.5) <= 3.0 * rt.std_error + rt.bias_bound);

  // a mixed-exponential fit with one negative weight; density
  // 2e^{-u} - 2e^{-2u} is a valid pdf with mean 1.5
  LevyModel mixed{1.0, 0.0,
                  CompoundPoisson{0.5, MixedExpClaims{{2.0, -1.0}, {1.0, 2.0}}}};
  Simulator ms(mixed);
  const auto rm = ms.estimate(0.0, plan, ruin);
  CHECK(std::abs(rm.mean - 0.75) <= 3.0 * rm.std_error + rm.bias_bound);
}

TEST_CASE("simulation input guards") {
  Simulator sim(cl_model());
  SimPlan plan;
  plan.n_paths = 100;
  WeightSpec ruin{WeightKind::DiscountedRuin, 0.0, 0.0, {}};

  SimPlan bad = plan;
  bad.n_paths = 0;
  CHECK_THROWS_AS(sim.estimate(1.0, bad, ruin), std::domain_error);
  bad = plan;
  bad.step = 0.0;
  CHECK_THROWS_AS(sim.estimate(1.0, bad, ruin), std::domain_error);
  CHECK_THROWS_AS(sim.estimate(-1.0, plan, ruin), std::domain_error);
  CHECK_THROWS_AS(sim.adaptive_level(0.0), std::domain_error);
  CHECK_THROWS_AS(sim.adaptive_level(1.0), std::domain_error);

  // drift to -infinity: no finite stopping level exists
  LevyModel sinking{0.5, 0.0, CompoundPoisson{1.0, ExpClaims{1.0}}};
  Simulator ss(sinking);
  CHECK_THROWS_AS(ss.estimate(1.0, plan, ruin), std::domain_error);
  CHECK_THROWS_AS(ss.adaptive_level(1e-4), std::domain_error);
  SimPlan horizon = plan;
  horizon.t_max = 50.0;
  CHECK_NOTHROW(ss.estimate(1.0, horizon, ruin));

  // an event box no path can reach
  WeightSpec far{WeightKind::DiscountedRuin, 0.0, 0.0, {}};
  far.box.z_lo = 400.0;
  CHECK_THROWS_AS(sim.estimate(1.0, plan, far), NumericalError);
}
