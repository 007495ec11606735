#include "levyfluct/levy_model.hpp"

#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace levyfluct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (1 - exp(-z))/z, (1 - (1+z)exp(-z))/z^2, (2 - (2+2z+z^2)exp(-z))/z^3.
// These show up when integrating a linear density segment against exp(-s u).
// Series fallbacks keep them stable near z = 0.
template <class T>
T e1(T z) {
  if (std::abs(z) < 1e-4)
    return T(1.0) - z / T(2.0) + z * z / T(6.0) - z * z * z / T(24.0);
  return (T(1.0) - std::exp(-z)) / z;
}

template <class T>
T e2(T z) {
  if (std::abs(z) < 1e-4)
    return T(0.5) - z / T(3.0) + z * z / T(8.0) - z * z * z / T(30.0);
  return (T(1.0) - (T(1.0) + z) * std::exp(-z)) / (z * z);
}

template <class T>
T e3(T z) {
  if (std::abs(z) < 1e-3)
    return T(1.0 / 3.0) - z / T(4.0) + z * z / T(10.0) - z * z * z / T(36.0);
  return (T(2.0) - (T(2.0) + T(2.0) * z + z * z) * std::exp(-z)) /
         (z * z * z);
}

// Integral over one table segment [u0, u1] of (p0 + m (u-u0)) exp(-s u).
// Scalars go through T() so the complex<long double> instantiation compiles.
template <class T>
T segment_lt(double u0, double u1, double p0, double p1, T s) {
  double d = u1 - u0;
  double m = (p1 - p0) / d;
  T z = s * T(d);
  return std::exp(-s * T(u0)) * (T(p0 * d) * e1(z) + T(m * d * d) * e2(z));
}

// Same with an extra factor of u in the integrand.
template <class T>
T segment_lt_u(double u0, double u1, double p0, double p1, T s) {
  double d = u1 - u0;
  double m = (p1 - p0) / d;
  T z = s * T(d);
  return std::exp(-s * T(u0)) *
         (T(u0 * p0 * d) * e1(z) + T((p0 + u0 * m) * d * d) * e2(z) +
          T(m * d * d * d) * e3(z));
}

template <class T>
T table_lt_base(const TableClaims& t, T s) {
  T acc = 0.0;
  for (size_t i = 0; i + 1 < t.knots.size(); ++i)
    acc += segment_lt(t.knots[i], t.knots[i + 1], t.density[i],
                      t.density[i + 1], s);
  return acc;
}

template <class T>
T table_lt_u_base(const TableClaims& t, T s) {
  T acc = 0.0;
  for (size_t i = 0; i + 1 < t.knots.size(); ++i)
    acc += segment_lt_u(t.knots[i], t.knots[i + 1], t.density[i],
                        t.density[i + 1], s);
  return acc;
}

const CompoundPoisson* cp_of(const LevyModel& m) {
  return std::get_if<CompoundPoisson>(&m.jumps);
}

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

// --- claim distribution helpers ---

double claim_density(const ClaimDist& d, double u) {
  if (u < 0.0) return 0.0;
  return std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return c.eta * std::exp(-c.eta * u);
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          double acc = 0.0;
          for (size_t i = 0; i < c.rates.size(); ++i)
            acc += c.weights[i] * c.rates[i] * std::exp(-c.rates[i] * u);
          return acc;
        } else {
          if (u < c.knots.front() || u > c.knots.back()) return 0.0;
          auto it = std::upper_bound(c.knots.begin(), c.knots.end(), u);
          size_t i = std::min<size_t>(c.knots.size() - 2,
                                      it == c.knots.begin()
                                          ? 0
                                          : (size_t)(it - c.knots.begin() - 1));
          double w = (u - c.knots[i]) / (c.knots[i + 1] - c.knots[i]);
          double base = c.density[i] * (1.0 - w) + c.density[i + 1] * w;
          return c.norm * base * std::exp(-c.tilt * u);
        }
      },
      d);
}

double claim_tail(const ClaimDist& d, double u) {
  if (u <= 0.0) return 1.0;
  return std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return std::exp(-c.eta * u);
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          double acc = 0.0;
          for (size_t i = 0; i < c.rates.size(); ++i)
            acc += c.weights[i] * std::exp(-c.rates[i] * u);
          return acc;
        } else {
          if (u >= c.knots.back()) return 0.0;
          double acc = 0.0;
          for (size_t i = 0; i + 1 < c.knots.size(); ++i) {
            double a = c.knots[i], b = c.knots[i + 1];
            if (b <= u) continue;
            double lo = std::max(a, u);
            double p_lo = c.density[i] + (c.density[i + 1] - c.density[i]) *
                                             (lo - a) / (b - a);
            acc += segment_lt(lo, b, p_lo, c.density[i + 1], c.tilt);
          }
          return c.norm * acc;
        }
      },
      d);
}

double claim_mean(const ClaimDist& d) {
  return std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return 1.0 / c.eta;
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          double acc = 0.0;
          for (size_t i = 0; i < c.rates.size(); ++i)
            acc += c.weights[i] / c.rates[i];
          return acc;
        } else {
          return c.norm * table_lt_u_base(c, c.tilt);
        }
      },
      d);
}

template <class T>
static T claim_lt_impl(const ClaimDist& d, T s) {
  return std::visit(
      [&](const auto& c) -> T {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return T(c.eta) / (T(c.eta) + s);
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          T acc = T(0.0);
          for (size_t i = 0; i < c.rates.size(); ++i)
            acc += T(c.weights[i] * c.rates[i]) / (T(c.rates[i]) + s);
          return acc;
        } else {
          return T(c.norm) * table_lt_base(c, s + T(c.tilt));
        }
      },
      d);
}

double claim_lt(const ClaimDist& d, double s) { return claim_lt_impl(d, s); }
cplx claim_lt(const ClaimDist& d, cplx s) { return claim_lt_impl(d, s); }

double claim_lt_m1(const ClaimDist& d, double s) {
  return std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return -s / (c.eta + s);
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          double acc = 0.0;
          for (size_t i = 0; i < c.rates.size(); ++i)
            acc += c.weights[i] * (-s) / (c.rates[i] + s);
          return acc;
        } else {
          if (std::abs(s) * (c.knots.back() + 1.0) < 1e-7)
            return -s * claim_mean(d);
          return claim_lt_impl(d, s) - 1.0;
        }
      },
      d);
}

template <class T>
static T claim_lt_deriv_impl(const ClaimDist& d, T s) {
  return std::visit(
      [&](const auto& c) -> T {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          T v = T(c.eta) + s;
          return -T(c.eta) / (v * v);
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          T acc = T(0.0);
          for (size_t i = 0; i < c.rates.size(); ++i) {
            T v = T(c.rates[i]) + s;
            acc += -T(c.weights[i] * c.rates[i]) / (v * v);
          }
          return acc;
        } else {
          return -T(c.norm) * table_lt_u_base(c, s + T(c.tilt));
        }
      },
      d);
}

double claim_lt_deriv(const ClaimDist& d, double s) {
  return claim_lt_deriv_impl(d, s);
}

ClaimDist tilt_claims(const ClaimDist& d, double c) {
  if (c < 0.0) bad("tilt parameter must be nonnegative");
  if (c == 0.0) return d;
  return std::visit(
      [&](const auto& cl) -> ClaimDist {
        using C = std::decay_t<decltype(cl)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return ExpClaims{cl.eta + c};
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          double lt = claim_lt(d, c);
          MixedExpClaims out;
          out.weights.resize(cl.rates.size());
          out.rates.resize(cl.rates.size());
          for (size_t i = 0; i < cl.rates.size(); ++i) {
            out.rates[i] = cl.rates[i] + c;
            out.weights[i] =
                cl.weights[i] * cl.rates[i] / ((cl.rates[i] + c) * lt);
          }
          return out;
        } else {
          TableClaims out = cl;
          out.tilt += c;
          out.norm = cl.norm / claim_lt(d, c);
          return out;
        }
      },
      d);
}

// --- model-level quantities ---

double laplace_exponent_analytic(const LevyModel& m, double a) {
  double v = m.drift * a + 0.5 * m.sigma * m.sigma * a * a;
  if (const auto* cp = cp_of(m)) v += cp->rate * claim_lt_m1(cp->claims, a);
  return v;
}

double laplace_exponent(const LevyModel& m, double a) {
  if (a < 0.0)
    throw std::domain_error("laplace_exponent requires alpha >= 0");
  return laplace_exponent_analytic(m, a);
}

cplx laplace_exponent(const LevyModel& m, cplx s) {
  cplx v = m.drift * s + 0.5 * m.sigma * m.sigma * s * s;
  if (const auto* cp = cp_of(m))
    v += cp->rate * (claim_lt(cp->claims, s) - 1.0);
  return v;
}

std::complex<long double> laplace_exponent_ld(const LevyModel& m,
                                              std::complex<long double> s) {
  using CL = std::complex<long double>;
  CL v = (long double)m.drift * s +
         0.5L * (long double)m.sigma * (long double)m.sigma * s * s;
  if (const auto* cp = cp_of(m))
    v += (long double)cp->rate * (claim_lt_impl<CL>(cp->claims, s) - 1.0L);
  return v;
}

double laplace_exponent_deriv(const LevyModel& m, double a) {
  double v = m.drift + m.sigma * m.sigma * a;
  if (const auto* cp = cp_of(m)) v += cp->rate * claim_lt_deriv(cp->claims, a);
  return v;
}

cplx laplace_exponent_deriv(const LevyModel& m, cplx s) {
  cplx v = m.drift + m.sigma * m.sigma * s;
  if (const auto* cp = cp_of(m))
    v += cp->rate * claim_lt_deriv_impl(cp->claims, s);
  return v;
}

double laplace_exponent_second(const LevyModel& m, double a) {
  double v = m.sigma * m.sigma;
  if (const auto* cp = cp_of(m)) {
    // second derivative of the claim transform
    std::visit(
        [&](const auto& c) {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, ExpClaims>) {
            double q = c.eta + a;
            v += cp->rate * 2.0 * c.eta / (q * q * q);
          } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
            for (size_t i = 0; i < c.rates.size(); ++i) {
              double q = c.rates[i] + a;
              v += cp->rate * 2.0 * c.weights[i] * c.rates[i] / (q * q * q);
            }
          } else {
            // numeric second derivative of the table transform
            double h = 1e-5 * std::max(1.0, std::abs(a));
            double f0 = claim_lt(cp->claims, a - h);
            double f1 = claim_lt(cp->claims, a);
            double f2 = claim_lt(cp->claims, a + h);
            v += cp->rate * (f0 - 2.0 * f1 + f2) / (h * h);
          }
        },
        cp->claims);
  }
  return v;
}

double mean_drift(const LevyModel& m) {
  double v = m.drift;
  if (const auto* cp = cp_of(m)) v -= cp->rate * claim_mean(cp->claims);
  return v;
}

Variation variation_class(const LevyModel& m) {
  return m.sigma > 0.0 ? Variation::Unbounded : Variation::Bounded;
}

double drift_coefficient_b(const LevyModel& m) {
  if (variation_class(m) != Variation::Bounded)
    throw std::domain_error(
        "drift coefficient only defined for bounded variation paths");
  return m.drift;
}

LevyModel tilt(const LevyModel& m, double c) {
  if (c < 0.0) bad("tilt parameter must be nonnegative");
  LevyModel out;
  out.sigma = m.sigma;
  out.drift = m.drift + m.sigma * m.sigma * c;
  if (const auto* cp = cp_of(m)) {
    CompoundPoisson j;
    j.rate = cp->rate * claim_lt(cp->claims, c);
    j.claims = tilt_claims(cp->claims, c);
    out.jumps = j;
  }
  return out;
}

double jump_rate(const LevyModel& m) {
  const auto* cp = cp_of(m);
  return cp ? cp->rate : 0.0;
}

double jump_measure_density(const LevyModel& m, double size) {
  if (size <= 0.0) return 0.0;
  const auto* cp = cp_of(m);
  return cp ? cp->rate * claim_density(cp->claims, size) : 0.0;
}

double jump_measure_tail(const LevyModel& m, double size) {
  const auto* cp = cp_of(m);
  return cp ? cp->rate * claim_tail(cp->claims, size) : 0.0;
}

double exponent_domain_lo(const LevyModel& m) {
  const auto* cp = cp_of(m);
  if (!cp) return -kInf;
  return std::visit(
      [&](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          return -c.eta;
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          return -*std::min_element(c.rates.begin(), c.rates.end());
        } else {
          // transform of a compactly supported density is entire; cap the
          // strip where exp(|s| u_max) stays comfortably inside double range
          return -600.0 / std::max(c.knots.back(), 1e-12);
        }
      },
      cp->claims);
}

bool has_rational_exponent(const LevyModel& m) {
  const auto* cp = cp_of(m);
  if (!cp) return true;
  return !std::holds_alternative<TableClaims>(cp->claims);
}

namespace {

double toms_root(const LevyModel& m, double level, double lo, double hi,
                 double flo, double fhi) {
  boost::math::tools::eps_tolerance<double> tol(44);
  std::uintmax_t iter = 200;
  auto f = [&](double a) { return laplace_exponent_analytic(m, a) - level; };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iter);
  double x = 0.5 * (r.first + r.second);
  // two Newton steps to polish to machine precision
  for (int i = 0; i < 2; ++i) {
    double fp = laplace_exponent_deriv(m, x);
    if (!(fp > 0.0) || !std::isfinite(fp)) break;
    x -= (laplace_exponent_analytic(m, x) - level) / fp;
  }
  return x;
}

}  // namespace

double phi_inverse(const LevyModel& m, double q) {
  if (q < 0.0) throw std::domain_error("phi_inverse requires q >= 0");
  double md = mean_drift(m);
  if (q == 0.0 && md >= 0.0) return 0.0;
  double lo, flo;
  if (q == 0.0) {
    // drift to -inf: phi dips negative right of 0 and the largest root is
    // strictly positive; a small offset gives a valid bracket
    lo = 1e-9;
    flo = laplace_exponent_analytic(m, lo);
    if (!(flo < 0.0)) return phi_inverse_extended(m, 0.0);
  } else {
    lo = 0.0;
    flo = -q;
  }
  double hi = 1.0, fhi = 0.0;
  for (int i = 0; i < 300; ++i) {
    fhi = laplace_exponent_analytic(m, hi) - q;
    if (fhi > 0.0) break;
    hi *= 2.0;
  }
  return toms_root(m, q, lo, hi, flo, fhi);
}

double phi_inverse_extended(const LevyModel& m, double level) {
  if (level == 0.0 && mean_drift(m) >= 0.0) return 0.0;
  double dom_lo = exponent_domain_lo(m);
  // right end of bracket: phi eventually exceeds any level
  double hi = 1.0;
  for (int i = 0; i < 300 && laplace_exponent_analytic(m, hi) <= level; ++i)
    hi *= 2.0;
  // locate the argmin: phi' is increasing, find where it turns negative
  double t;
  if (std::isfinite(dom_lo)) {
    t = 0.5 * dom_lo;
    for (int i = 0; i < 500 && laplace_exponent_deriv(m, t) >= 0.0; ++i)
      t = 0.5 * (t + dom_lo);
  } else {
    t = -1.0;
    for (int i = 0; i < 300 && laplace_exponent_deriv(m, t) >= 0.0; ++i)
      t *= 2.0;
  }
  double theta_star = t;
  if (laplace_exponent_deriv(m, t) < 0.0) {
    boost::math::tools::eps_tolerance<double> tol(44);
    std::uintmax_t iter = 200;
    auto fp = [&](double a) { return laplace_exponent_deriv(m, a); };
    auto r = boost::math::tools::toms748_solve(fp, t, hi, tol, iter);
    theta_star = 0.5 * (r.first + r.second);
  }
  double fmin = laplace_exponent_analytic(m, theta_star);
  if (fmin > level)
    throw std::domain_error("no real solution: level below the exponent minimum");
  if (fmin == level) return theta_star;
  double flo = fmin - level;
  return toms_root(m, level, theta_star, hi, flo,
                   laplace_exponent_analytic(m, hi) - level);
}

double phi_inverse_deriv(const LevyModel& m, double q) {
  double fp = laplace_exponent_deriv(m, phi_inverse(m, q));
  if (!(fp > 0.0))
    throw std::domain_error("phi_inverse not differentiable here");
  return 1.0 / fp;
}

// --- validation ---

void LevyModel::validate() const {
  if (!std::isfinite(drift) || !std::isfinite(sigma))
    bad("drift and sigma must be finite");
  if (sigma < 0.0) bad("sigma must be nonnegative");
  const auto* cp = std::get_if<CompoundPoisson>(&jumps);
  if (sigma == 0.0) {
    if (!cp) bad("model with sigma = 0 and no jumps is degenerate");
    if (drift <= 0.0)
      bad("sigma = 0 requires drift > 0 (paths must not be non-increasing)");
  }
  if (!cp) return;
  if (!(cp->rate > 0.0) || !std::isfinite(cp->rate))
    bad("jump rate must be positive and finite");
  std::visit(
      [&](const auto& c) {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, ExpClaims>) {
          if (!(c.eta > 0.0)) bad("exponential claim rate must be positive");
        } else if constexpr (std::is_same_v<C, MixedExpClaims>) {
          if (c.weights.empty() || c.weights.size() != c.rates.size())
            bad("mixed-exponential weights and rates must match and be nonempty");
          double wsum = 0.0;
          for (double w : c.weights) wsum += w;
          if (std::abs(wsum - 1.0) > 1e-9)
            bad("mixed-exponential weights must sum to 1");
          for (double r : c.rates)
            if (!(r > 0.0)) bad("mixed-exponential rates must be positive");
          for (size_t i = 0; i < c.rates.size(); ++i)
            for (size_t j = i + 1; j < c.rates.size(); ++j)
              if (std::abs(c.rates[i] - c.rates[j]) <=
                  1e-9 * std::max(c.rates[i], c.rates[j]))
                bad("mixed-exponential rates must be distinct");
          // signed weights are fine only if the density stays nonnegative
          double rmin = *std::min_element(c.rates.begin(), c.rates.end());
          double peak = 0.0;
          for (int k = 0; k <= 256; ++k) {
            double u = 12.0 / rmin * k / 256.0;
            double v = claim_density(ClaimDist{c}, u);
            peak = std::max(peak, std::abs(v));
            if (v < -1e-10 * std::max(peak, 1.0))
              bad("mixed-exponential density is negative");
          }
        } else {
          if (c.knots.size() < 2 || c.knots.size() != c.density.size())
            bad("claim table needs matching knot and density arrays, length >= 2");
          if (c.knots.front() < 0.0) bad("claim table knots must be >= 0");
          for (size_t i = 0; i + 1 < c.knots.size(); ++i)
            if (!(c.knots[i + 1] > c.knots[i]))
              bad("claim table knots must be strictly increasing");
          for (double p : c.density)
            if (!(p >= 0.0) || !std::isfinite(p))
              bad("claim table density values must be nonnegative");
          if (!(c.norm > 0.0)) bad("claim table normalization must be positive");
          double total = claim_lt(ClaimDist{c}, 0.0);
          if (std::abs(total - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "claim table density integrates to " << total
               << ", expected 1";
            bad(os.str());
          }
        }
      },
      cp->claims);
}

}  // namespace levyfluct
