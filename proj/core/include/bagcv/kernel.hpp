#pragma once

#include <cmath>
#include <numbers>

namespace bagcv {

/// Scalars of a second-order kernel that enter the bandwidth formulas.
struct KernelConstants {
  double r_k = 0.0;     ///< R(K) = int K^2
  double mu2 = 0.0;     ///< int u^2 K(u) du
  double mu4 = 0.0;     ///< int u^4 K(u) du
  double int_vw = 0.0;  ///< int V(u) W(u) du
  double r_v = 0.0;     ///< R(V), calibrated (see calibrate_rv)
};

inline constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

// Standard Gaussian kernel. Only this kernel ships; KernelConstants keeps the
// formulas kernel-agnostic.

inline double kernel_eval(double u) noexcept { return inv_sqrt_2pi * std::exp(-0.5 * u * u); }

inline double kernel_deriv(double u) noexcept { return -u * kernel_eval(u); }

/// (K*K)(u), i.e. the N(0,2) density.
inline double kernel_selfconv(double u) noexcept {
  return 0.5 * std::numbers::inv_sqrtpi * std::exp(-0.25 * u * u);
}

/// Gaussian kernel constants with the calibrated R(V).
KernelConstants gaussian_constants() noexcept;
/// Same, with an explicit R(V) (calibration and sensitivity studies).
KernelConstants gaussian_constants(double r_v) noexcept;

}  // namespace bagcv
