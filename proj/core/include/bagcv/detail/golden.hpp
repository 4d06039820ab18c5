#pragma once

#include <utility>

namespace bagcv::detail {

/// Golden-section search for a minimum of f on [a, b]. Returns the best point
/// evaluated and its value.
template <class F>
std::pair<double, double> golden_section(F&& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  std::pair<double, double> best = fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
  while (b - a > tol) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc < best.second) best = {c, fc};
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd < best.second) best = {d, fd};
    }
  }
  return best;
}

}  // namespace bagcv::detail
