#pragma once

#include <functional>

namespace bagcv {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (61 point) on [a, b]; either end may be infinite.
/// Throws NumericalError when the error estimate misses rel_tol.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10);

}  // namespace bagcv
