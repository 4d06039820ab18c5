#include "bagcv/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bagcv/cv.hpp"
#include "bagcv/detail/fast_exp.hpp"
#include "bagcv/detail/golden.hpp"
#include "bagcv/error.hpp"
#include "bagcv/quadrature.hpp"

namespace bagcv {

namespace {

// Probabilists' Hermite polynomial He_k(z).
double hermite(int k, double z) noexcept {
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = z;
  for (int j = 1; j < k; ++j) {
    const double next = z * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// k-th derivative of the N(0, s^2) density at x.
double normal_density_derivative(int k, double x, double s) noexcept {
  const double z = x / s;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite(k, z) * inv_sqrt_2pi * std::exp(-0.5 * z * z) / std::pow(s, k + 1);
}

double normal_density(double x, double s) noexcept { return normal_density_derivative(0, x, s); }

double mixture_functional(const GaussianMixture& f, int r) {
  const std::size_t k = f.components();
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double s = std::hypot(f.sds[i], f.sds[j]);
      total += f.weights[i] * f.weights[j] * normal_density_derivative(2 * r, f.means[i] - f.means[j], s);
    }
  }
  return (r % 2 == 0) ? total : -total;
}

// Second and third derivatives by central differences, one Richardson step
// (h, h/2), giving O(h^4) truncation error.
double second_derivative(const std::function<double(double)>& f, double x, double h) {
  auto d2 = [&](double s) { return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s); };
  const double coarse = d2(h);
  const double fine = d2(0.5 * h);
  return fine + (fine - coarse) / 3.0;
}

double third_derivative(const std::function<double(double)>& f, double x, double h) {
  auto d3 = [&](double s) {
    return (f(x + 2.0 * s) - 2.0 * f(x + s) + 2.0 * f(x - s) - f(x - 2.0 * s)) / (2.0 * s * s * s);
  };
  const double coarse = d3(h);
  const double fine = d3(0.5 * h);
  return fine + (fine - coarse) / 3.0;
}

}  // namespace

void GaussianMixture::validate() const {
  const std::size_t k = weights.size();
  if (k == 0 || means.size() != k || sds.size() != k) {
    throw ConfigError("mixture needs equal, non-zero numbers of weights, means and sds");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(weights[i] > 0.0) || !(sds[i] > 0.0) || !std::isfinite(means[i]) || !std::isfinite(sds[i])) {
      throw ConfigError("mixture weights and sds must be positive and finite");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-10) throw ConfigError("mixture weights must sum to 1");
}

double GaussianMixture::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < components(); ++i) m += weights[i] * means[i];
  return m;
}

double GaussianMixture::sd() const noexcept {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < components(); ++i) {
    v += weights[i] * (sds[i] * sds[i] + (means[i] - mu) * (means[i] - mu));
  }
  return std::sqrt(v);
}

GaussianMixture preset(Preset p) {
  switch (p) {
    case Preset::D1:
      return {{0.75, 0.25}, {0.0, 1.5}, {1.0, 1.0 / 3.0}};
    case Preset::D2_claw:
      return {{0.5, 0.1, 0.1, 0.1, 0.1, 0.1},
              {0.0, -1.0, -0.5, 0.0, 0.5, 1.0},
              {1.0, 0.1, 0.1, 0.1, 0.1, 0.1}};
    case Preset::bimodal_T1:
      return {{0.5, 0.5}, {-1.5, 1.5}, {0.5, 0.5}};
    case Preset::std_normal:
      return {{1.0}, {0.0}, {1.0}};
  }
  throw ConfigError("unknown preset");
}

GaussianMixture preset(std::string_view name) {
  if (name == "D1") return preset(Preset::D1);
  if (name == "D2" || name == "claw" || name == "D2_claw") return preset(Preset::D2_claw);
  if (name == "bimodal" || name == "bimodal_T1") return preset(Preset::bimodal_T1);
  if (name == "std_normal" || name == "normal") return preset(Preset::std_normal);
  throw ConfigError("unknown density preset '" + std::string(name) + "'");
}

double mixture_pdf(const GaussianMixture& f, double x) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < f.components(); ++i) {
    total += f.weights[i] * normal_density(x - f.means[i], f.sds[i]);
  }
  return total;
}

double mixture_pdf_derivative(const GaussianMixture& f, double x, int r) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < f.components(); ++i) {
    total += f.weights[i] * normal_density_derivative(r, x - f.means[i], f.sds[i]);
  }
  return total;
}

std::vector<double> mixture_draw(const GaussianMixture& f, std::size_t n, Rng& rng) {
  std::vector<double> cdf(f.components());
  std::partial_sum(f.weights.begin(), f.weights.end(), cdf.begin());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double u = unif(rng) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto c = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    x = f.means[c] + f.sds[c] * normal(rng);
  }
  return out;
}

Sample mixture_sample(const GaussianMixture& f, std::size_t n, std::uint64_t seed) {
  Rng rng = derived_stream(seed, 0);
  return Sample(mixture_draw(f, n, rng));
}

DensityFunctionals functionals_mixture(const GaussianMixture& f) {
  return {mixture_functional(f, 0), mixture_functional(f, 2), mixture_functional(f, 3)};
}

DensityFunctionals functionals_quadrature(const std::function<double(double)>& pdf,
                                          Interval support, FunctionalQuadratureOptions opts) {
  const double step = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0) * opts.scale;
  auto squared = [](auto g) { return [g](double x) { double v = g(x); return v * v; }; };
  const auto run = [&](const std::function<double(double)>& g, const char* what) {
    try {
      return integrate(g, support.lo, support.hi, opts.rel_tol).value;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("functionals_quadrature(") + what + "): " + e.what());
    }
  };
  DensityFunctionals out;
  out.r_f = run(squared([&](double x) { return pdf(x); }), "R(f)");
  out.r_f2 = run(squared([&](double x) { return second_derivative(pdf, x, step); }), "R(f'')");
  out.r_f3 = run(squared([&](double x) { return third_derivative(pdf, x, step); }), "R(f''')");
  return out;
}

DensityFunctionals functionals_quadrature(const DensityDerivatives& d, Interval support,
                                          double rel_tol) {
  const auto run = [&](const std::function<double(double)>& g, const char* what) {
    try {
      return integrate([&](double x) { const double v = g(x); return v * v; }, support.lo,
                       support.hi, rel_tol)
          .value;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("functionals_quadrature(") + what + "): " + e.what());
    }
  };
  return {run(d.f, "R(f)"), run(d.f2, "R(f'')"), run(d.f3, "R(f''')")};
}

double mise_exact(const GaussianMixture& f, std::size_t n, double h) {
  if (!(h > 0.0)) throw DomainError("mise_exact: bandwidth must be positive");
  if (n < 2) throw DomainError("mise_exact: n must be at least 2");
  const double nn = static_cast<double>(n);
  const std::size_t k = f.components();
  double quad = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = f.means[i] - f.means[j];
      const double s2 = f.sds[i] * f.sds[i] + f.sds[j] * f.sds[j];
      const double omega2 = normal_density(d, std::sqrt(2.0 * h * h + s2));
      const double omega1 = normal_density(d, std::sqrt(h * h + s2));
      const double omega0 = normal_density(d, std::sqrt(s2));
      quad += f.weights[i] * f.weights[j] * ((1.0 - 1.0 / nn) * omega2 - 2.0 * omega1 + omega0);
    }
  }
  return 0.5 * std::numbers::inv_sqrtpi / (nn * h) + quad;
}

double h_mise(const GaussianMixture& f, std::size_t n) {
  const double base = f.sd() * std::pow(static_cast<double>(n), -0.2);
  const Interval bracket{1e-3 * base, 10.0 * base};
  // MISE can have more than one local minimum for multimodal f; scan first.
  constexpr int grid = 80;
  const double a0 = std::log(bracket.lo);
  const double step = (std::log(bracket.hi) - a0) / grid;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double v = mise_exact(f, n, std::exp(a0 + step * k));
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  if (best == 0 || best == grid) {
    throw NumericalError("h_mise: minimizer at the edge of the bracket");
  }
  const auto mise_log = [&](double t) { return mise_exact(f, n, std::exp(t)); };
  return std::exp(
      detail::golden_section(mise_log, a0 + step * (best - 1), a0 + step * (best + 1), 1e-10).first);
}

double mise_asymptotic(const DensityFunctionals& fn, const KernelConstants& kc, std::size_t n,
                       double h) {
  if (!(h > 0.0)) throw DomainError("mise_asymptotic: bandwidth must be positive");
  return kc.r_k / (static_cast<double>(n) * h) + 0.25 * std::pow(h, 4) * kc.mu2 * kc.mu2 * fn.r_f2;
}

std::vector<double> kde_evaluate(const Sample& data, double h, std::span<const double> xs) {
  if (!(h > 0.0)) throw DomainError("kde_evaluate: bandwidth must be positive");
  const auto v = data.values();
  const double reach = pair_cutoff * h;
  const double a = -0.5 / (h * h);
  const double norm = inv_sqrt_2pi / (static_cast<double>(v.size()) * h);
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    const auto lo = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x - reach) - v.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), x + reach) - v.begin());
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = x - v[i];
      acc += detail::exp_nonpositive(a * d * d);
    }
    out[k] = norm * acc;
  }
  return out;
}

double ise(const Sample& data, double h, const GaussianMixture& f, std::size_t points) {
  if (points < 2) throw DomainError("ise: need at least 2 quadrature points");
  const double lo = f.mean() - 8.0 * f.sd();
  const double hi = f.mean() + 8.0 * f.sd();
  const double dx = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> xs(points);
  for (std::size_t k = 0; k < points; ++k) xs[k] = lo + dx * static_cast<double>(k);
  const auto est = kde_evaluate(data, h, xs);
  double total = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double e = est[k] - mixture_pdf(f, xs[k]);
    total += (k == 0 || k + 1 == points ? 0.5 : 1.0) * e * e;
  }
  return total * dx;
}

}  // namespace bagcv
