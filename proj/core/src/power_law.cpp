#include "bagcv/power_law.hpp"

#include <cmath>

#include "bagcv/error.hpp"

namespace bagcv {

PowerLawFit fit_power_law(std::span<const double> ns, std::span<const double> ys) {
  if (ns.size() != ys.size()) throw DomainError("fit_power_law: size mismatch");
  if (ns.size() < 2) throw DomainError("fit_power_law: need at least two points");
  const auto k = static_cast<double>(ns.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("fit_power_law: inputs must be positive");
    mx += std::log(ns[i]);
    my += std::log(ys[i]);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(ys[i]) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_power_law: need at least two distinct n");
  PowerLawFit fit;
  fit.beta1 = sxy / sxx;
  const double log_b0 = my - fit.beta1 * mx;
  fit.beta0 = std::exp(log_b0);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double e = std::log(ys[i]) - log_b0 - fit.beta1 * std::log(ns[i]);
    fit.residual_ss += e * e;
  }
  return fit;
}

double extrapolate(const PowerLawFit& fit, double n) {
  if (!(n > 0.0)) throw DomainError("extrapolate: n must be positive");
  return fit.beta0 * std::pow(n, fit.beta1);
}

}  // namespace bagcv
