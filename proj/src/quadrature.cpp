#include "levyfluct/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>

#include "levyfluct/errors.hpp"

namespace levyfluct {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, int max_depth) {
  if (!(b > a)) return {0.0, 0.0};
  double err = 0.0;
  double v = GK::integrate(f, a, b, max_depth, rel_tol, &err);
  return {v, err};
}

QuadResult integrate_tail(const std::function<double(double)>& f, double a,
                          double scale_hint, double rel_tol) {
  if (scale_hint <= 0.0 || !std::isfinite(scale_hint)) scale_hint = 1.0;
  double lo = a;
  double width = 4.0 * scale_hint;
  double acc = 0.0, acc_err = 0.0;
  double last = 0.0;
  for (int panel = 0; panel < 200; ++panel) {
    double err = 0.0;
    double v = GK::integrate(f, lo, lo + width, 15, rel_tol, &err);
    acc += v;
    acc_err += err;
    double tol = rel_tol * std::max(std::abs(acc), 1e-300);
    // Geometric decay projection: remainder ~ |v| * r / (1 - r) with
    // r = |v|/|last|. Conservative cap of r at 0.9.
    if (panel > 0) {
      double r = std::abs(last) > 0.0 ? std::abs(v) / std::abs(last) : 0.0;
      if (r > 0.9) r = 0.9;
      double rem = std::abs(v) * r / (1.0 - r);
      if (std::abs(v) < tol && rem < tol) return {acc, acc_err + rem};
    } else if (std::abs(v) == 0.0 && std::abs(acc) == 0.0) {
      return {acc, acc_err};
    }
    last = v;
    lo += width;
    width *= 1.6;
  }
  throw NumericalError("tail integral did not settle", acc_err);
}

}  // namespace levyfluct
