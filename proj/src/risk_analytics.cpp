#include "levyfluct/risk_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "levyfluct/quadrature.hpp"

namespace levyfluct {

namespace {

void need(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// sum of the five smooth kernel terms at (y, a, b) for a start at x; the
// z dependence sits entirely in the jump-measure factor outside
double kernel_sum(const ScaleEvaluator& ev, GSKernelForm form, double x,
                  double y, double a, double b) {
  const double wab = ev.W(a - b);
  const double wpab = ev.W_prime(a - b);
  const double way = ev.W(a - y);
  const double wpay = ev.W_prime(a - y);
  const double wxb = ev.W(x - b);
  const double wpxb = ev.W_prime(x - b);
  const double k1 = wpxb * wpay / wab;
  const double k2 = -wpxb * way * wpab / (wab * wab);
  const double k3 = -wxb * ev.W_second(a - b) * way / (wab * wab);
  const double k4 = -wxb * wpab * wpay / (wab * wab);
  double k5 = 2.0 * way * wpab * wpab / (wab * wab * wab);
  if (form == GSKernelForm::Derived) k5 *= wxb;
  return k1 + k2 + k3 + k4 + k5;
}

}  // namespace

PenaltySpec unit_penalty() {
  PenaltySpec s;
  s.w = [](double, double, double, double) { return 1.0; };
  s.wyab = [](double, double, double) { return 1.0; };
  s.wz = [](double) { return 1.0; };
  return s;
}

PenaltySpec deficit_power_penalty(double k) {
  need(k >= 0.0, "deficit_power_penalty: requires k >= 0");
  PenaltySpec s;
  s.w = [k](double, double z, double, double) { return std::pow(z, k); };
  s.wyab = [](double, double, double) { return 1.0; };
  s.wz = [k](double z) { return std::pow(z, k); };
  return s;
}

PenaltySpec band_penalty(double y_lo, double y_hi, double z_lo, double z_hi) {
  need(0.0 <= y_lo && y_lo < y_hi && 0.0 <= z_lo && z_lo < z_hi,
       "band_penalty: requires 0 <= lo < hi in both coordinates");
  PenaltySpec s;
  s.w = [=](double y, double z, double, double) {
    return (y >= y_lo && y <= y_hi && z >= z_lo && z <= z_hi) ? 1.0 : 0.0;
  };
  s.wyab = [=](double y, double, double) {
    return (y >= y_lo && y <= y_hi) ? 1.0 : 0.0;
  };
  s.wz = [=](double z) { return (z >= z_lo && z <= z_hi) ? 1.0 : 0.0; };
  // the penalty support implies the truncations
  s.y_max = y_hi;
  s.z_max = z_hi;
  return s;
}

PenaltySpec exp_deficit_penalty(double sdecay) {
  need(sdecay >= 0.0, "exp_deficit_penalty: requires s >= 0");
  PenaltySpec s;
  s.w = [sdecay](double, double z, double, double) {
    return std::exp(-sdecay * z);
  };
  s.wyab = [](double, double, double) { return 1.0; };
  s.wz = [sdecay](double z) { return std::exp(-sdecay * z); };
  return s;
}

RiskEngine::RiskEngine(LevyModel m, ScaleEvaluator::Backend backend,
                       InversionParams params)
    : model_(std::move(m)), laws_(model_, backend, params) {}

GSResult RiskEngine::gerber_shiu(double q, double x, const PenaltySpec& spec,
                                 GSKernelForm form) const {
  need(q >= 0.0 && x >= 0.0, "gerber_shiu: requires q, x >= 0");
  need(spec.w != nullptr, "gerber_shiu: penalty function not set");
  need((spec.wyab == nullptr) == (spec.wz == nullptr),
       "gerber_shiu: declare both factors of the penalty or neither");
  need(spec.rel_tol > 0.0, "gerber_shiu: requires a positive tolerance");
  const double md = mean_drift(model_);
  need(md > 0.0, "gerber_shiu: requires positive mean drift");

  const ScaleEvaluator& ev = laws_.scale(q);
  const double ratio = q > 0.0 ? q / ev.phi_q() : md;
  const double ruin_transform = ev.Z(x) - ratio * ev.W(x);

  GSResult out;

  if (model_.sigma != 0.0) {
    // total creeping mass is the ruin transform less the jump-ruin mass;
    // the penalty sees the atom location directly
    const double k6 = ruin_transform - laws_.jump_recovery_mass(q, 0.0, x);
    out.creeping_part = spec.w(0.0, 0.0, x, 0.0) * k6;
  }

  if (jump_rate(model_) > 0.0) {
    // the second derivative in the kernel is only available analytically
    need(has_rational_exponent(model_),
         "gerber_shiu: model lacks closed-form scale derivatives");

    const double cm =
        claim_mean(std::get<CompoundPoisson>(model_.jumps).claims);
    const double pq = ev.phi_q();
    const double y_hi =
        spec.y_max > 0.0 ? spec.y_max : x + 35.0 * cm / (1.0 + pq * cm);
    const double z_hi = spec.z_max > 0.0 ? spec.z_max : 35.0 * cm;
    const double tol_in = 0.1 * spec.rel_tol;
    // the five kernel terms stay O(1) while their sum decays along a, so
    // far down the tail the inner integrals sit on cancellation noise;
    // stopping the tail against the outer tolerance (and bounding the
    // inner depth) keeps the quadrature out of that regime
    const double tol_tail = 0.3 * spec.rel_tol;
    const double hint_a = cm + 1.0 / (1.0 + pq);
    const double w0 = ev.W(0.0);

    // (a, b)-mass carried by one (y, z) pair: adaptive in b inside a tail
    // integral in a, plus the atom lines and corner of the bounded
    // variation case (w0 > 0) when the surplus y exceeds the start
    // (a, b)-mass at fixed y against the weight view wf(a, b)
    auto ab_mass = [&](double y, auto const& wf) {
      const double b_hi = std::min(x, y);
      auto over_b = [&](double a) {
        auto f = [&](double b) {
          return wf(a, b) * kernel_sum(ev, form, x, y, a, b);
        };
        return integrate(f, 0.0, b_hi, tol_in, 6).value;
      };
      double acc = 0.0;
      if (b_hi > 0.0)
        acc += integrate_tail(over_b, std::max(x, y), hint_a, tol_tail).value;
      if (w0 > 0.0 && y > x) {
        // ruin straight off a record high: supremum atom at a = y
        auto line_a = [&](double b) {
          const double wyb = ev.W(y - b);
          return wf(y, b) * w0 *
                 (ev.W_prime(x - b) * wyb - ev.W(x - b) * ev.W_prime(y - b)) /
                 (wyb * wyb);
        };
        if (x > 0.0) acc += integrate(line_a, 0.0, x, tol_in, 6).value;
        // never under the start before ruin: infimum atom at b = x
        auto line_b = [&](double a) {
          const double wax = ev.W(a - x);
          return wf(a, x) * w0 *
                 (ev.W_prime(a - y) * wax - ev.W(a - y) * ev.W_prime(a - x)) /
                 (wax * wax);
        };
        acc += integrate_tail(line_b, y, hint_a, tol_tail).value;
        // both at once
        acc += wf(y, x) * w0 * w0 / ev.W(y - x);
      }
      return acc;
    };

    const bool factored = spec.wyab != nullptr;
    // with a declared factorization the deficit integral involves no scale
    // functions and hoists out of the extrema quadrature entirely
    auto over_z = [&](double y) {
      if (factored) {
        auto fz = [&](double z) {
          return spec.wz(z) * jump_measure_density(model_, y + z);
        };
        const double zmass = integrate(fz, 0.0, z_hi, tol_in).value;
        if (zmass == 0.0) return 0.0;
        auto wf = [&](double a, double b) { return spec.wyab(y, a, b); };
        return zmass * ab_mass(y, wf);
      }
      auto f = [&](double z) {
        auto wf = [&](double a, double b) { return spec.w(y, z, a, b); };
        return jump_measure_density(model_, y + z) * ab_mass(y, wf);
      };
      return integrate(f, 0.0, z_hi, tol_in).value;
    };
    // the integrand changes character where the surplus before ruin passes
    // the start (atom terms switch on, the b-range stops growing), so split
    // there instead of letting the refinement hunt for the kink
    QuadResult jy{0.0, 0.0};
    const double y_split = std::min(x, y_hi);
    if (y_split > 0.0) {
      const QuadResult lo = integrate(over_z, 0.0, y_split, spec.rel_tol);
      jy.value += lo.value;
      jy.error += lo.error;
    }
    if (y_hi > y_split) {
      const QuadResult hi = integrate(over_z, y_split, y_hi, spec.rel_tol);
      jy.value += hi.value;
      jy.error += hi.error;
    }
    out.jump_part = jy.value;
    // inner tolerances contribute at most their share of the total
    out.error_estimate = jy.error + tol_in * std::abs(jy.value);
  }

  out.value = out.jump_part + out.creeping_part;
  return out;
}

double RiskEngine::dickson_density(double q, double x, double y) const {
  need(q >= 0.0, "dickson_density: requires q >= 0");
  need(x >= 0.0 && y > 0.0, "dickson_density: requires x >= 0 and y > 0");
  need(jump_rate(model_) > 0.0,
       "dickson_density: requires compound Poisson claims");
  const double c = phi_inverse(model_, q);
  const double dphi = laplace_exponent_deriv(model_, c);
  const double diff = tilted_nonruin(c, x) - tilted_nonruin(c, x - y);
  return jump_measure_tail(model_, y) * std::exp(c * (x - y)) / dphi * diff;
}

double RiskEngine::ruin_probability(double x) const {
  const double md = mean_drift(model_);
  need(md > 0.0, "ruin_probability: requires positive mean drift");
  if (x < 0.0) return 1.0;
  return 1.0 - std::min(1.0, md * laws_.scale(0.0).W(x));
}

double RiskEngine::tilted_nonruin(double c, double x) const {
  need(c >= 0.0, "tilted_nonruin: requires c >= 0");
  if (x < 0.0) return 0.0;
  // mean drift of the tilted model is phi'(c)
  const double md = laplace_exponent_deriv(model_, c);
  need(md > 0.0, "tilted_nonruin: tilted model must drift to infinity");
  return std::min(1.0, md * laws_.tilted_scale(c, 0.0).W(x));
}

std::vector<KernelCheckRow> RiskEngine::kernel_crosscheck(double q,
                                                          double x) const {
  need(q >= 0.0 && x > 0.0, "kernel_crosscheck: requires q >= 0 and x > 0");
  need(has_rational_exponent(model_),
       "kernel_crosscheck: model lacks closed-form scale derivatives");
  const ScaleEvaluator& ev = laws_.scale(q);
  auto F = [&](double y, double a, double b) {
    return ev.W(x - b) * ev.W(a - y) / ev.W(a - b);
  };
  std::vector<KernelCheckRow> rows;
  const double h = 1e-4;
  for (double y : {0.5 * x, 0.8 * x, 1.4 * x, 2.0 * x}) {
    for (double da : {0.5, 1.5}) {
      KernelCheckRow r;
      r.y = y;
      r.a = std::max(x, y) + da;
      r.b = 0.3 * std::min(x, y);
      r.repeated = kernel_sum(ev, GSKernelForm::RepeatedFactor, x, y, r.a, r.b);
      r.derived = kernel_sum(ev, GSKernelForm::Derived, x, y, r.a, r.b);
      r.fd_oracle = -(F(y, r.a + h, r.b + h) - F(y, r.a + h, r.b - h) -
                      F(y, r.a - h, r.b + h) + F(y, r.a - h, r.b - h)) /
                    (4.0 * h * h);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace levyfluct
