#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bagcv/density.hpp"
#include "bagcv/em.hpp"
#include "bagcv/kernel.hpp"
#include "bagcv/sample.hpp"

namespace bagcv {

/// Leading bias constants of the bagged bandwidth: the rescaling bias
/// mu_rescale m^{-1/5} and the CV bias mu_cv, both relative to h_{n0}.
struct BiasConstants {
  double mu_rescale = 0.0;
  double mu_cv = 0.0;
};

/// mu_rescale = R(K)^{3/5} R(f''') mu4 / (20 R(f'')^{8/5}),
/// mu_cv = -8 R(f) int VW / (25 R(K)^{8/5} R(f'')^{2/5}).
BiasConstants bias_constants(const DensityFunctionals& fn, const KernelConstants& kc);

/// C = (R(K) / (mu2^2 R(f'')))^{1/5}, so that h_{n0} ~ C n^{-1/5}.
double c_constant(const DensityFunctionals& fn, const KernelConstants& kc);

/// A = 8 R(V) R(f) mu2^{4/5} / (25 R(K)^{9/5} R(f'')^{1/5}), the constant in
/// var(h_m)/h_{m0}^2 ~ A m^{-1/5}.
double a_constant(const DensityFunctionals& fn, const KernelConstants& kc);

/// ceil((mu_rescale/|mu_cv|)^5): the smallest m with mu_cv + mu_rescale m^{-1/5} <= 0.
/// Throws DomainError unless mu_cv < 0 < mu_rescale.
std::uint64_t m_crit(const BiasConstants& bias);

struct AmseInputs {
  double A = 0.0;
  double C = 0.0;
  BiasConstants bias;
  double n = 0.0;
  double N = 0.0;  ///< may be +infinity
};

/// A C^2 m^{-1/5} n^{-2/5} (1/N + (m/n)^2).
double amse_variance(const AmseInputs& in, double m);
/// m^{-2/5} n^{-2/5} (mu_cv + mu_rescale m^{-1/5})^2.
double amse_bias_sq(const AmseInputs& in, double m);
/// Variance plus squared bias, at real-valued m.
double amse(const AmseInputs& in, double m);

struct AmseMinimum {
  std::size_t m = 0;
  double value = 0.0;
  /// The minimizer is m = n: the curve prefers no subsampling at all.
  bool boundary = false;
};

inline constexpr std::size_t amse_grid_points = 200;

/// Log grid over [2, n], golden-section in log m around the best grid point,
/// then the better of floor/ceil (ties to the smaller m). The grid guards
/// against the curve's second local minimum at small N.
AmseMinimum minimize_amse(const AmseInputs& in);

struct AmseModel {
  double A = 0.0;
  double C = 0.0;
  BiasConstants bias;
  std::size_t n = 0;
  std::size_t N = 0;
  std::size_t m_hat = 0;
  bool boundary_warning = false;
  /// Pilot diagnostics (zero for models built from known functionals).
  std::size_t s = 0;
  std::size_t r = 0;
  std::size_t pilot_failures = 0;
  std::vector<std::size_t> pilot_components;

  AmseInputs inputs() const;
  double curve(double m) const { return amse(inputs(), m); }
};

/// Model from known density functionals (analytic or quadrature).
AmseModel amse_model(const DensityFunctionals& fn, const KernelConstants& kc, std::size_t n,
                     std::size_t N);

struct M0Options {
  std::size_t s = 50;
  /// Pilot subsample size; 0 selects min(max(500, n/100), n - 1).
  std::size_t r = 0;
  std::uint64_t seed = 0;
  MixtureFitOptions fit;
  unsigned threads = 0;
};

/// Pilot estimate of the AMSE-optimal subsample size: s subsamples of size r
/// are drawn without replacement, each fitted by fit_mixture_bic, and the
/// per-subsample constants A, C, mu_cv, mu_rescale are averaged before the
/// curve is minimized for target size n. Throws NumericalError when more than
/// 20% of the pilot fits fail.
AmseModel estimate_m0(const Sample& data, std::size_t n, std::size_t N, const M0Options& opts,
                      const KernelConstants& kc);
AmseModel estimate_m0(const Sample& data, std::size_t n, std::size_t N, const M0Options& opts);

/// Monte Carlo estimate of R(V) from the variance of the full-sample CV
/// bandwidth for standard normal data at n = 1000 and n = 2000.
struct RvCalibration {
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::vector<std::size_t> sizes;
  std::vector<double> a_hat;        ///< var(h)/h_{n0}^2 n^{1/5} per size
  std::vector<double> r_v_by_size;  ///< A inverted for R(V) per size
  double r_v = 0.0;                 ///< average of r_v_by_size
  double disagreement = 0.0;        ///< |a1 - a2| / mean(a1, a2)
  bool consistent = false;          ///< disagreement <= 0.25
  std::size_t d1_m0 = 0;            ///< minimize_amse, D1, n = 1e5, N = 500
  bool d1_within_10pct = false;     ///< against 13081
  std::size_t claw_m0 = 0;          ///< same for the claw
  /// R(V) from the leading-order variance of the CV derivative,
  /// R(rho)/4 with rho(u) = (u gamma(u))' and gamma = K*K - 2K.
  double r_v_asymptotic = 0.0;
};

inline constexpr double d1_m0_target = 13081.0;

/// Runs the calibration without judging it.
RvCalibration calibrate_rv_report(std::uint64_t seed, std::size_t replicates,
                                  unsigned threads = 0);

/// Calibrated R(V). Throws DomainError for replicates < 500 and NumericalError
/// when the two size-level estimates disagree by more than 25%.
double calibrate_rv(std::uint64_t seed, std::size_t replicates, unsigned threads = 0);

/// R(rho)/4 by quadrature (see RvCalibration::r_v_asymptotic).
double rv_asymptotic_reference();

}  // namespace bagcv
