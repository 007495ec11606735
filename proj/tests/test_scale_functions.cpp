#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "levyfluct/errors.hpp"
#include "levyfluct/quadrature.hpp"
#include "levyfluct/scale_functions.hpp"

using namespace levyfluct;

namespace {

LevyModel cramer_lundberg() {
  return LevyModel{1.2, 0.0, CompoundPoisson{1.0, ExpClaims{1.0}}};
}

LevyModel jump_diffusion() {
  return LevyModel{1.1, 0.4,
                   CompoundPoisson{0.9, MixedExpClaims{{0.4, 0.6}, {0.7, 2.0}}}};
}

LevyModel table_model() {
  return LevyModel{1.5, 0.0,
                   CompoundPoisson{0.8, TableClaims{{0.0, 1.0, 2.0}, {0.0, 1.0, 0.0}}}};
}

LevyModel brownian() { return LevyModel{0.3, 0.8, NoJumps{}}; }

// The defining property: the Laplace transform of W over [0, inf) equals
// 1 / (phi(s) - q) right of the dominant exponential rate. Checking it by
// quadrature validates any backend without reusing its own series.
// quad_tol must sit above the backend's own noise floor or the adaptive
// refinement exhausts its depth hunting digits that are not there
void check_transform_identity(const ScaleEvaluator& ev, double s, double tol,
                              double quad_tol) {
  const double gap = s - ev.phi_q();
  REQUIRE(gap > 0.0);
  auto damped = [&](double x) { return std::exp(-s * x) * ev.W(x); };
  // truncation error is below e^{-26} of the mass, well under every
  // tolerance used; a genuinely semi-infinite driver would probe x beyond
  // the inversion backend's round-off range
  const double got = integrate(damped, 0.0, 26.0 / gap, quad_tol).value;
  const double oracle =
      1.0 / (laplace_exponent_analytic(ev.model(), s) - ev.q());
  CHECK(got == doctest::Approx(oracle).epsilon(tol));
}

}  // namespace

TEST_CASE("closed-form backend satisfies the transform identity") {
  ScaleEvaluator cl(cramer_lundberg(), 0.1, ScaleEvaluator::Backend::ClosedForm);
  for (double s : {0.6, 1.5, 3.0}) check_transform_identity(cl, s, 1e-8, 1e-9);

  ScaleEvaluator jd(jump_diffusion(), 0.05, ScaleEvaluator::Backend::ClosedForm);
  for (double s : {0.8, 2.0}) check_transform_identity(jd, s, 1e-8, 1e-9);

  ScaleEvaluator bm(brownian(), 0.1, ScaleEvaluator::Backend::ClosedForm);
  for (double s : {0.9, 2.5}) check_transform_identity(bm, s, 1e-8, 1e-9);
}

TEST_CASE("inversion backend satisfies the transform identity") {
  // keep s - Phi(q) above one so the tail quadrature never drags the
  // contour into the round-off regime at extreme x
  ScaleEvaluator cl(cramer_lundberg(), 0.1, ScaleEvaluator::Backend::Inversion);
  for (double s : {1.5, 3.0}) check_transform_identity(cl, s, 1e-7, 1e-8);

  // compact support makes the claim transform entire and the contour weak
  // at small x; the renewal branch covers that range, so the identity
  // holds to a few times 1e-6 rather than full precision
  ScaleEvaluator tab(table_model(), 0.1);
  CHECK(tab.backend() == ScaleEvaluator::Backend::Inversion);
  for (double s : {1.5, 4.0}) check_transform_identity(tab, s, 1e-5, 1e-7);
}

TEST_CASE("two-exponential closed form for exponential claims") {
  // phi(t) - q multiplied by (eta + t) is a quadratic whose roots and
  // residues give W directly; derived here from scratch as the oracle
  const double c = 1.2, lam = 1.0, eta = 1.0, q = 0.1;
  const double disc = std::sqrt((c * eta - lam - q) * (c * eta - lam - q) +
                                4.0 * c * q * eta);
  const double r1 = (-(c * eta - lam - q) + disc) / (2.0 * c);
  const double r2 = (-(c * eta - lam - q) - disc) / (2.0 * c);
  auto dphi = [&](double t) { return c - lam * eta / ((eta + t) * (eta + t)); };
  auto w_oracle = [&](double x) {
    return std::exp(r1 * x) / dphi(r1) + std::exp(r2 * x) / dphi(r2);
  };

  CHECK(r1 == doctest::Approx(0.25).epsilon(1e-14));

  ScaleEvaluator ev(cramer_lundberg(), q);
  CHECK(ev.backend() == ScaleEvaluator::Backend::ClosedForm);
  CHECK(ev.phi_q() == doctest::Approx(0.25).epsilon(1e-12));
  for (double x : {0.0, 0.3, 1.0, 4.0, 12.0})
    CHECK(ev.W(x) == doctest::Approx(w_oracle(x)).epsilon(1e-12));

  // pinned digits, recomputed from the oracle above
  CHECK(ev.W(1.0) == doctest::Approx(1.610491757825).epsilon(1e-12));
  CHECK(ev.W_prime(1.0) == doctest::Approx(0.800695889775).epsilon(1e-12));
  CHECK(ev.Z(1.0) == doctest::Approx(1.121884243512).epsilon(1e-12));

  ScaleEvaluator ev0(cramer_lundberg(), 0.0);
  CHECK(ev0.W(1.0) == doctest::Approx(1.472992812956).epsilon(1e-12));
  CHECK(ev0.Z(1.0) == 1.0);
}

TEST_CASE("brownian motion scale function in closed form") {
  const double c = 0.3, sig = 0.8, q = 0.1;
  const double disc = std::sqrt(c * c + 2.0 * sig * sig * q);
  const double t1 = (-c + disc) / (sig * sig);
  const double t2 = (-c - disc) / (sig * sig);
  auto w_oracle = [&](double x) {
    return 2.0 * (std::exp(t1 * x) - std::exp(t2 * x)) /
           (sig * sig * (t1 - t2));
  };
  auto z_oracle = [&](double x) {
    return 1.0 + q * 2.0 / (sig * sig * (t1 - t2)) *
                     ((std::exp(t1 * x) - 1.0) / t1 -
                      (std::exp(t2 * x) - 1.0) / t2);
  };

  ScaleEvaluator ev(brownian(), q);
  CHECK(ev.phi_q() == doctest::Approx(t1).epsilon(1e-13));
  for (double x : {0.2, 1.0, 5.0}) {
    CHECK(ev.W(x) == doctest::Approx(w_oracle(x)).epsilon(1e-12));
    CHECK(ev.Z(x) == doctest::Approx(z_oracle(x)).epsilon(1e-12));
  }
  CHECK(ev.W(0.0) == 0.0);
  CHECK(ev.W_prime(0.0) == doctest::Approx(2.0 / (sig * sig)).epsilon(1e-10));
}

TEST_CASE("boundary behaviour at zero and below") {
  ScaleEvaluator bv(cramer_lundberg(), 0.1);
  CHECK(bv.W(0.0) == doctest::Approx(1.0 / 1.2).epsilon(1e-13));
  CHECK(bv.W(-0.5) == 0.0);
  CHECK(bv.Z(-2.0) == 1.0);
  CHECK(bv.Z(0.0) == 1.0);

  ScaleEvaluator ubv(jump_diffusion(), 0.1);
  CHECK(ubv.W(0.0) == 0.0);
  CHECK(ubv.W(-1e-9) == 0.0);
}

TEST_CASE("derivatives agree with finite differences") {
  ScaleEvaluator ev(jump_diffusion(), 0.2);
  for (double x : {0.4, 1.0, 3.0}) {
    const double h = 1e-5;
    double fd1 = (ev.W(x + h) - ev.W(x - h)) / (2.0 * h);
    CHECK(ev.W_prime(x) == doctest::Approx(fd1).epsilon(1e-8));
    double fd2 = (ev.W_prime(x + h) - ev.W_prime(x - h)) / (2.0 * h);
    CHECK(ev.W_second(x) == doctest::Approx(fd2).epsilon(1e-7));
  }
  CHECK(ev.second_derivative_ready());

  ScaleEvaluator inv(cramer_lundberg(), 0.1, ScaleEvaluator::Backend::Inversion);
  CHECK(!inv.second_derivative_ready());
  CHECK_THROWS_AS(inv.W_second(1.0), std::domain_error);
}

TEST_CASE("antiderivative and exponential tail against quadrature") {
  for (auto backend : {ScaleEvaluator::Backend::ClosedForm,
                       ScaleEvaluator::Backend::Inversion}) {
    ScaleEvaluator ev(cramer_lundberg(), 0.1, backend);
    const bool closed = backend == ScaleEvaluator::Backend::ClosedForm;
    const double tol = closed ? 1e-10 : 1e-7;
    const double quad_tol = closed ? 1e-10 : 1e-8;
    for (double x : {0.5, 2.0}) {
      auto w_at = [&](double y) { return ev.W(y); };
      CHECK(ev.W_antideriv(x) ==
            doctest::Approx(integrate(w_at, 0.0, x, quad_tol).value)
                .epsilon(tol));
    }
    const double rate = 1.5;
    const double gap = rate - ev.phi_q();
    for (double x : {0.0, 1.0, 4.0}) {
      auto damped = [&](double y) { return std::exp(-rate * y) * ev.W(y); };
      double oracle = integrate(damped, x, x + 26.0 / gap, quad_tol).value;
      CHECK(ev.W_exp_tail(rate, x) == doctest::Approx(oracle).epsilon(tol));
    }
    CHECK_THROWS_AS(ev.W_exp_tail(0.2, 1.0), std::domain_error);
  }
}

TEST_CASE("exponential tilt identity") {
  // W_c^{(p)}(x) = exp(-c x) W^{(p + phi(c))}(x); the left side comes from
  // a genuinely tilted model so the two paths share no code
  for (const LevyModel& m : {cramer_lundberg(), jump_diffusion()}) {
    const double c = 0.4, target_q = 0.3;
    const double p = target_q - laplace_exponent(m, c);
    ScaleEvaluator tilted = make_tilted_evaluator(m, c, p);
    ScaleEvaluator base(m, target_q);
    for (double x : {0.2, 1.0, 5.0}) {
      CHECK(tilted.W(x) * std::exp(c * x) ==
            doctest::Approx(base.W(x)).epsilon(1e-9));
    }
    // the tilted rate is the shifted original rate
    CHECK(tilted.phi_q() == doctest::Approx(base.phi_q() - c).epsilon(1e-10));
  }
}

TEST_CASE("negative levels from recovery-style tilting") {
  // tilt by Phi(beta) at level q - beta; the dominant rate must come out
  // as Phi(q) - Phi(beta), here negative since beta > q
  LevyModel m = cramer_lundberg();
  const double q = 0.1, beta = 0.3;
  const double c = phi_inverse(m, beta);
  ScaleEvaluator ev = make_tilted_evaluator(m, c, q - beta);
  CHECK(ev.q() == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(ev.phi_q() ==
        doctest::Approx(phi_inverse(m, q) - c).epsilon(1e-10));
  CHECK(ev.phi_q() < 0.0);

  // the transform identity still holds right of the (negative) rate
  for (double s : {0.9, 2.0}) check_transform_identity(ev, s, 1e-8, 1e-9);
}

TEST_CASE("backends agree away from closed form") {
  ScaleEvaluator closed(cramer_lundberg(), 0.1,
                        ScaleEvaluator::Backend::ClosedForm);
  ScaleEvaluator contour(cramer_lundberg(), 0.1,
                         ScaleEvaluator::Backend::Inversion);
  for (double x : {0.01, 0.5, 1.0, 5.0, 15.0, 30.0}) {
    CHECK(contour.W(x) == doctest::Approx(closed.W(x)).epsilon(1e-8));
  }
  for (double x : {0.5, 3.0}) {
    CHECK(contour.W_prime(x) ==
          doctest::Approx(closed.W_prime(x)).epsilon(1e-5));
    CHECK(contour.Z(x) == doctest::Approx(closed.Z(x)).epsilon(1e-8));
  }

  ScaleEvaluator closed_jd(jump_diffusion(), 0.05,
                           ScaleEvaluator::Backend::ClosedForm);
  ScaleEvaluator contour_jd(jump_diffusion(), 0.05,
                            ScaleEvaluator::Backend::Inversion);
  for (double x : {0.1, 1.0, 8.0}) {
    CHECK(contour_jd.W(x) == doctest::Approx(closed_jd.W(x)).epsilon(1e-8));
  }
}

TEST_CASE("auto backend picks the rational route when it exists") {
  CHECK(ScaleEvaluator(cramer_lundberg(), 0.1).backend() ==
        ScaleEvaluator::Backend::ClosedForm);
  CHECK(ScaleEvaluator(jump_diffusion(), 0.1).backend() ==
        ScaleEvaluator::Backend::ClosedForm);
  CHECK(ScaleEvaluator(table_model(), 0.1).backend() ==
        ScaleEvaluator::Backend::Inversion);
}

TEST_CASE("inversion reports an honest failure when pushed too far") {
  // an impossible target at large x forces the contour round-off floor
  // above the acceptance threshold
  InversionParams strict;
  strict.target = 1e-15;
  ScaleEvaluator ev(cramer_lundberg(), 0.1, ScaleEvaluator::Backend::Inversion,
                    strict);
  try {
    (void)ev.W(50.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.achieved_error() > 1e-15);
  }
}

TEST_CASE("evaluators are safe under concurrent reads") {
  ScaleEvaluator ev(cramer_lundberg(), 0.1, ScaleEvaluator::Backend::Inversion);
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.25 * i);

  std::vector<double> serial;
  ScaleEvaluator ref(cramer_lundberg(), 0.1, ScaleEvaluator::Backend::Inversion);
  for (double x : grid) serial.push_back(ref.W(x));

  std::vector<double> a(grid.size()), b(grid.size());
  std::thread t1([&] {
    for (size_t i = 0; i < grid.size(); ++i) a[i] = ev.W(grid[i]);
  });
  std::thread t2([&] {
    for (size_t i = grid.size(); i-- > 0;) b[i] = ev.W(grid[i]);
  });
  t1.join();
  t2.join();
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(a[i] == serial[i]);
    CHECK(b[i] == serial[i]);
  }
}

TEST_CASE("survival probability") {
  LevyModel cl = cramer_lundberg();
  CHECK(survival_probability(cl, 0.0) ==
        doctest::Approx(0.2 / 1.2).epsilon(1e-12));
  CHECK(survival_probability(cl, 200.0) == doctest::Approx(1.0).epsilon(1e-6));

  // unit-drift unit-volatility Brownian motion: 1 - exp(-2x)
  LevyModel bm{1.0, 1.0, NoJumps{}};
  CHECK(survival_probability(bm, 1.0) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-10));

  double prev = 0.0;
  for (double x = 0.0; x <= 30.0; x += 1.5) {
    double s = survival_probability(cl, x);
    CHECK(s >= prev - 1e-14);
    CHECK(s <= 1.0);
    prev = s;
  }

  LevyModel sinking{0.8, 0.0, CompoundPoisson{1.0, ExpClaims{1.0}}};
  CHECK_THROWS_AS(survival_probability(sinking, 1.0), std::domain_error);
}

TEST_CASE("scale function is nonnegative and nondecreasing") {
  for (const LevyModel& m : {cramer_lundberg(), jump_diffusion()}) {
    for (double q : {0.0, 0.15}) {
      ScaleEvaluator ev(m, q);
      double prev = 0.0;
      for (double x = 0.0; x <= 10.0; x += 0.25) {
        double w = ev.W(x);
        CHECK(w >= prev - 1e-12);
        prev = w;
      }
    }
  }
}
