#pragma once

#include <stdexcept>
#include <string>

namespace levyfluct {

// Thrown when a numerical routine cannot reach its precision target
// (transform inversion, adaptive quadrature, root polishing). Carries the
// best error estimate achieved so callers can report it instead of a bare
// failure.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const { return achieved_; }

private:
  double achieved_;
};

}  // namespace levyfluct
