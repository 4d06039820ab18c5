#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bagcv/kernel.hpp"
#include "bagcv/rng.hpp"
#include "bagcv/sample.hpp"

namespace bagcv {

/// f(x) = sum_i w_i phi((x - mu_i)/sigma_i)/sigma_i.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;

  std::size_t components() const noexcept { return weights.size(); }
  /// Throws ConfigError unless sizes agree, k >= 1, weights > 0 summing to 1
  /// (1e-10) and sds > 0.
  void validate() const;
  double mean() const noexcept;
  double sd() const noexcept;
};

enum class Preset { D1, D2_claw, bimodal_T1, std_normal };

GaussianMixture preset(Preset p);
/// Accepts "D1", "D2", "claw", "D2_claw", "bimodal", "bimodal_T1", "std_normal", "normal".
GaussianMixture preset(std::string_view name);

double mixture_pdf(const GaussianMixture& f, double x) noexcept;
/// r-th derivative of the mixture density, r <= 6.
double mixture_pdf_derivative(const GaussianMixture& f, double x, int r) noexcept;

/// Component by inverse CDF on the weights, then a normal draw.
std::vector<double> mixture_draw(const GaussianMixture& f, std::size_t n, Rng& rng);
Sample mixture_sample(const GaussianMixture& f, std::size_t n, std::uint64_t seed);

/// R(f), R(f''), R(f''').
struct DensityFunctionals {
  double r_f = 0.0;
  double r_f2 = 0.0;
  double r_f3 = 0.0;
};

/// Closed form: R(f^(r)) = (-1)^r sum_ij w_i w_j phi^(2r)_{s_ij}(mu_i - mu_j),
/// s_ij^2 = sigma_i^2 + sigma_j^2.
DensityFunctionals functionals_mixture(const GaussianMixture& f);

struct FunctionalQuadratureOptions {
  /// Length scale of the density's finest feature; sets the difference step.
  double scale = 1.0;
  double rel_tol = 1e-6;
};

/// Quadrature of f^2, f''^2, f'''^2 with Richardson-extrapolated central
/// differences for the derivatives. `pdf` must be defined (possibly 0) just
/// outside `support`.
DensityFunctionals functionals_quadrature(const std::function<double(double)>& pdf,
                                          Interval support,
                                          FunctionalQuadratureOptions opts = {});

/// f, f'' and f''' of a density known in closed form.
struct DensityDerivatives {
  std::function<double(double)> f;
  std::function<double(double)> f2;
  std::function<double(double)> f3;
};

/// Quadrature of f^2, f''^2, f'''^2 from exact derivatives.
DensityFunctionals functionals_quadrature(const DensityDerivatives& d, Interval support,
                                          double rel_tol = 1e-10);

/// Exact MISE of the Gaussian-kernel estimator for a Gaussian mixture:
/// (2 sqrt(pi) n h)^{-1} + w' [(1 - 1/n) O_2 - 2 O_1 + O_0] w with
/// O_a[i][j] = phi_{sqrt(a h^2 + s_i^2 + s_j^2)}(mu_i - mu_j).
double mise_exact(const GaussianMixture& f, std::size_t n, double h);

/// Minimizer h_{n0} of mise_exact on [1e-3, 10] * sd(f) * n^{-1/5}.
double h_mise(const GaussianMixture& f, std::size_t n);

/// R(K)/(nh) + mu2^2 h^4 R(f'')/4.
double mise_asymptotic(const DensityFunctionals& fn, const KernelConstants& kc, std::size_t n,
                       double h);

/// Integrated squared error of the Gaussian-kernel estimate against f,
/// trapezoid rule on `points` nodes over mean(f) +- 8 sd(f).
double ise(const Sample& data, double h, const GaussianMixture& f, std::size_t points = 2048);

/// Kernel density estimate f_h at each of `xs`.
std::vector<double> kde_evaluate(const Sample& data, double h, std::span<const double> xs);

}  // namespace bagcv
