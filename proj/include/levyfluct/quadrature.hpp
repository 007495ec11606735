#pragma once

#include <functional>

namespace levyfluct {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

// Adaptive Gauss-Kronrod on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, int max_depth = 15);

// Integral over [a, inf) of an (eventually) decaying integrand, done in
// geometrically growing panels. `scale_hint` sets the first panel width,
// roughly the decay length of the integrand. Stops once a panel and the
// projected remainder fall below the tolerance.
QuadResult integrate_tail(const std::function<double(double)>& f, double a,
                          double scale_hint, double rel_tol = 1e-10);

}  // namespace levyfluct
