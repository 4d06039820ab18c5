#pragma once

#include <cstddef>
#include <span>

namespace bagcv {

/// y = beta0 n^beta1, fitted by least squares on (log n, log y).
struct PowerLawFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double residual_ss = 0.0;  ///< on the log scale
};

/// Throws DomainError for fewer than two points, mismatched sizes,
/// nonpositive values or a single distinct n.
PowerLawFit fit_power_law(std::span<const double> ns, std::span<const double> ys);

double extrapolate(const PowerLawFit& fit, double n);

}  // namespace bagcv
