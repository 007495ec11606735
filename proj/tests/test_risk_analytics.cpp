#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "levyfluct/errors.hpp"
#include "levyfluct/levy_model.hpp"
#include "levyfluct/quadrature.hpp"
#include "levyfluct/risk_analytics.hpp"

using namespace levyfluct;

namespace {

LevyModel cramer_lundberg() {
  return LevyModel{1.2, 0.0, CompoundPoisson{1.0, ExpClaims{1.0}}};
}

LevyModel jump_diffusion() {
  return LevyModel{1.1, 0.4,
                   CompoundPoisson{0.9, MixedExpClaims{{0.4, 0.6}, {0.7, 2.0}}}};
}

double ruin_transform(const ScaleEvaluator& ev, double x) {
  return ev.Z(x) - ev.q() / ev.phi_q() * ev.W(x);
}

// two-dimensional reduction of the penalty integral for weights that
// ignore the extrema: integrating the kernel over (a, b) gives back the
// killed resolvent, so only w(y, z) pi(y + z) u(x, y) remains
double reduced_oracle(const RiskEngine& eng, double q, double x,
                      const std::function<double(double, double)>& w,
                      double y_hi, double z_hi) {
  const LevyModel& m = eng.model();
  auto over_y = [&](double y) {
    const double u = eng.laws().potential_density(q, x, y);
    auto f = [&](double z) { return w(y, z) * jump_measure_density(m, y + z); };
    double inner;
    if (z_hi > 0.0)
      inner = integrate(f, 0.0, z_hi, 1e-9).value;
    else
      inner = integrate_tail(f, 0.0, claim_mean(std::get<CompoundPoisson>(m.jumps).claims),
                             1e-9).value;
    return u * inner;
  };
  double split = std::min(x, y_hi > 0.0 ? y_hi : x);
  double acc = 0.0;
  if (split > 0.0) acc += integrate(over_y, 0.0, split, 1e-9).value;
  if (y_hi > 0.0) {
    if (y_hi > split) acc += integrate(over_y, split, y_hi, 1e-9).value;
  } else {
    acc += integrate_tail(over_y, split, 1.0, 1e-9).value;
  }
  return acc;
}

}  // namespace

TEST_CASE("unit penalty reproduces the closed ruin transform") {
  // with w identically one the four-dimensional integral must collapse to
  // E_x[e^{-qT}; T < inf]; without a Gaussian part every contribution is
  // jump-carried, and at x = 0 the whole mass sits on the boundary atoms
  RiskEngine eng(cramer_lundberg());
  const double q = 0.1;
  const ScaleEvaluator& ev = eng.laws().scale(q);
  for (double x : {0.0, 0.5, 1.0, 2.0}) {
    const GSResult r = eng.gerber_shiu(q, x, unit_penalty());
    const double rt = ruin_transform(ev, x);
    CHECK(r.value == doctest::Approx(rt).epsilon(1e-6));
    CHECK(r.creeping_part == 0.0);
    CHECK(r.jump_part == r.value);
    CHECK(r.error_estimate > 0.0);
    CHECK(std::abs(r.value - rt) <= r.error_estimate);
  }
}

TEST_CASE("a diffusion part splits the penalty into jump and creeping masses") {
  RiskEngine eng(jump_diffusion());
  const double q = 0.1, x = 1.0;
  const ScaleEvaluator& ev = eng.laws().scale(q);
  const GSResult r = eng.gerber_shiu(q, x, unit_penalty());
  CHECK(r.value == doctest::Approx(ruin_transform(ev, x)).epsilon(1e-6));
  CHECK(r.jump_part > 0.0);
  CHECK(r.creeping_part > 0.0);
  // the jump part must agree with the jump-ruin mass the recovery law
  // computes from the (y, z) density alone, an independent route
  CHECK(r.jump_part ==
        doctest::Approx(eng.laws().jump_recovery_mass(q, 0.0, x)).epsilon(1e-4));

  // from zero a Gaussian path is ruined immediately by diffusion, so the
  // whole unit mass is creeping
  const GSResult r0 = eng.gerber_shiu(q, 0.0, unit_penalty());
  CHECK(r0.jump_part == 0.0);
  CHECK(r0.creeping_part == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("penalties blind to the extrema collapse to the two-dimensional law") {
  // when w depends on (y, z) alone the (a, b) integration is analytic and
  // only the killed resolvent remains; the full quadrature has to match
  const double q = 0.1, x = 1.0;

  RiskEngine cl(cramer_lundberg());
  const PenaltySpec band = band_penalty(0.3, 2.0, 0.1, 1.5);
  const GSResult rb = cl.gerber_shiu(q, x, band);
  const double ob = reduced_oracle(
      cl, q, x,
      [](double y, double z) {
        return (y >= 0.3 && y <= 2.0 && z >= 0.1 && z <= 1.5) ? 1.0 : 0.0;
      },
      2.0, 1.5);
  CHECK(rb.value == doctest::Approx(ob).epsilon(1e-4));

  const GSResult rp = cl.gerber_shiu(q, x, deficit_power_penalty(1.3));
  const double op = reduced_oracle(
      cl, q, x, [](double, double z) { return std::pow(z, 1.3); }, 0.0, 0.0);
  CHECK(rp.value == doctest::Approx(op).epsilon(1e-4));

  RiskEngine jd(jump_diffusion());
  const GSResult rj = jd.gerber_shiu(q, x, band);
  const double oj = reduced_oracle(
      jd, q, x,
      [](double y, double z) {
        return (y >= 0.3 && y <= 2.0 && z >= 0.1 && z <= 1.5) ? 1.0 : 0.0;
      },
      2.0, 1.5);
  CHECK(rj.value == doctest::Approx(oj).epsilon(1e-4));
  // the band excludes the creeping atom at (0, 0), so no creeping part
  CHECK(rj.creeping_part == 0.0);

  // stripping the declared factorization forces the generic path, which
  // must land on the same value
  PenaltySpec generic = band_penalty(0.6, 1.0, 0.2, 0.6);
  generic.wyab = nullptr;
  generic.wz = nullptr;
  const GSResult rg = cl.gerber_shiu(q, x, generic);
  const GSResult rf = cl.gerber_shiu(q, x, band_penalty(0.6, 1.0, 0.2, 0.6));
  CHECK(rg.value == doctest::Approx(rf.value).epsilon(2e-4));
}

TEST_CASE("derived kernel matches the mixed-partial oracle, the repeated factor does not") {
  for (const LevyModel& m : {cramer_lundberg(), jump_diffusion()}) {
    RiskEngine eng(m);
    const auto rows = eng.kernel_crosscheck(0.1, 1.0);
    CHECK(rows.size() >= 6);
    for (const auto& r : rows) {
      CHECK(r.derived == doctest::Approx(r.fd_oracle).epsilon(2e-5));
      // the variant with the doubled W'(a-b) lands far off the oracle
      CHECK(std::abs(r.repeated - r.fd_oracle) >
            0.1 * std::abs(r.fd_oracle));
    }
  }
}

TEST_CASE("integrating the repeated-factor kernel reports non-convergence") {
  // the five terms stop cancelling along a under that variant, the sum
  // tends to a nonzero constant, and the tail integral cannot settle
  RiskEngine eng(cramer_lundberg());
  CHECK_THROWS_AS(
      eng.gerber_shiu(0.1, 1.0, unit_penalty(), GSKernelForm::RepeatedFactor),
      NumericalError);
}

TEST_CASE("surplus density in tilted-survival form matches the law assembly") {
  // the engine builds the density from a genuinely tilted model's survival
  // probability, the law engine from the resolvent against the jump tail;
  // the two must agree identically
  for (const LevyModel& m : {cramer_lundberg(), jump_diffusion()}) {
    RiskEngine eng(m);
    for (double q : {0.05, 0.5}) {
      for (double x : {0.0, 0.5, 1.5, 3.0}) {
        for (double y : {0.3, 1.0, 2.0, 4.0}) {
          const double d = eng.dickson_density(q, x, y);
          const double f = eng.laws().ruin_surplus_marginal(q, x, y);
          CHECK(d == doctest::Approx(f).epsilon(1e-10));
          CHECK(std::abs(d - f) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("discounting removes the safety-loading requirement") {
  // premium below the claim drain: the model sinks, yet for q > 0 the
  // dominant tilt drifts upward and the surplus density stays valid
  const LevyModel sinking{0.5, 0.0, CompoundPoisson{1.0, ExpClaims{1.0}}};
  CHECK(mean_drift(sinking) < 0.0);
  RiskEngine eng(sinking);
  const double q = 0.1;
  for (double x : {0.0, 1.0, 2.5}) {
    for (double y : {0.4, 1.2}) {
      const double d = eng.dickson_density(q, x, y);
      CHECK(d >= 0.0);
      CHECK(d == doctest::Approx(
                     eng.laws().ruin_surplus_marginal(q, x, y)).epsilon(1e-10));
    }
  }
  // without discounting the untilted survival is degenerate at zero drift
  // or below, and the plain ruin probability must refuse
  CHECK_THROWS_AS(eng.ruin_probability(1.0), std::domain_error);
}

TEST_CASE("surplus density from a zero start is explicit for bounded variation") {
  const LevyModel m = cramer_lundberg();
  RiskEngine eng(m);
  const double q = 0.1;
  const double c = phi_inverse(m, q);
  for (double y : {0.2, 1.0, 3.0}) {
    const double expected =
        jump_rate(m) / 1.2 * std::exp(-c * y) * claim_tail(ExpClaims{1.0}, y);
    CHECK(eng.dickson_density(q, 0.0, y) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("tilted survival at the dominant tilt collapses to the discounted scale function") {
  for (const LevyModel& m : {cramer_lundberg(), jump_diffusion()}) {
    RiskEngine eng(m);
    const double q = 0.2;
    const double c = phi_inverse(m, q);
    const ScaleEvaluator& ev = eng.laws().scale(q);
    for (double x : {0.5, 2.0}) {
      const double lhs = eng.tilted_nonruin(c, x);
      const double rhs =
          laplace_exponent_deriv(m, c) * std::exp(-c * x) * ev.W(x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("ruin probability closed forms and shape") {
  RiskEngine cl(cramer_lundberg());
  // the classical zero-start atom: claim load over premium
  CHECK(cl.ruin_probability(0.0) == doctest::Approx(1.0 / 1.2).epsilon(1e-12));
  CHECK(cl.ruin_probability(-0.5) == 1.0);

  // drifting Brownian motion: psi(x) = exp(-2 c x / sigma^2)
  const LevyModel bm{0.3, 0.8, NoJumps{}};
  RiskEngine eb(bm);
  const double rate = 2.0 * 0.3 / (0.8 * 0.8);
  for (double x : {0.0, 1.0, 3.0}) {
    CHECK(eb.ruin_probability(x) ==
          doctest::Approx(std::exp(-rate * x)).epsilon(1e-9));
  }

  double prev = 1.0;
  for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double p = cl.ruin_probability(x);
    CHECK(p >= 0.0);
    CHECK(p <= prev);
    prev = p;
  }
  CHECK(cl.ruin_probability(40.0) < 2e-3);
}

TEST_CASE("penalty integral input guards") {
  RiskEngine eng(cramer_lundberg());
  const PenaltySpec u = unit_penalty();
  CHECK_THROWS_AS(eng.gerber_shiu(-0.1, 1.0, u), std::domain_error);
  CHECK_THROWS_AS(eng.gerber_shiu(0.1, -1.0, u), std::domain_error);
  PenaltySpec empty;
  CHECK_THROWS_AS(eng.gerber_shiu(0.1, 1.0, empty), std::domain_error);
  PenaltySpec bad = unit_penalty();
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(eng.gerber_shiu(0.1, 1.0, bad), std::domain_error);
  PenaltySpec half = unit_penalty();
  half.wz = nullptr;
  CHECK_THROWS_AS(eng.gerber_shiu(0.1, 1.0, half), std::domain_error);

  CHECK_THROWS_AS(band_penalty(2.0, 1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(band_penalty(0.0, 1.0, 1.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(deficit_power_penalty(-1.0), std::domain_error);

  // tabulated claims have no closed scale derivatives, which the kernel
  // needs; the request must be refused, not silently approximated
  const LevyModel table{1.5, 0.0,
                        CompoundPoisson{0.8, TableClaims{{0.0, 1.0, 2.0},
                                                         {0.0, 1.0, 0.0}}}};
  RiskEngine et(table);
  CHECK_THROWS_AS(et.gerber_shiu(0.1, 1.0, u), std::domain_error);

  // pure diffusion has no claims to build a surplus density from
  const LevyModel bm{0.3, 0.8, NoJumps{}};
  RiskEngine eb(bm);
  CHECK_THROWS_AS(eb.dickson_density(0.1, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(eb.tilted_nonruin(-0.2, 1.0), std::domain_error);
}

TEST_CASE("penalty integral is deterministic across repeated evaluation") {
  RiskEngine eng(cramer_lundberg());
  const PenaltySpec band = band_penalty(0.5, 1.5, 0.2, 1.0);
  const GSResult a = eng.gerber_shiu(0.1, 0.8, band);
  const GSResult b = eng.gerber_shiu(0.1, 0.8, band);
  CHECK(a.value == b.value);
  CHECK(a.jump_part == b.jump_part);
  CHECK(a.error_estimate == b.error_estimate);
}
