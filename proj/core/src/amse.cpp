#include "bagcv/amse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bagcv/bagging.hpp"
#include "bagcv/detail/golden.hpp"
#include "bagcv/error.hpp"
#include "bagcv/parallel.hpp"
#include "bagcv/rng.hpp"

namespace bagcv {

namespace {

void require_positive(const DensityFunctionals& fn) {
  if (!(fn.r_f > 0.0 && fn.r_f2 > 0.0 && fn.r_f3 > 0.0)) {
    throw DomainError("density functionals must be positive");
  }
}

}  // namespace

BiasConstants bias_constants(const DensityFunctionals& fn, const KernelConstants& kc) {
  require_positive(fn);
  return {
      .mu_rescale = std::pow(kc.r_k, 0.6) * fn.r_f3 * kc.mu4 / (20.0 * std::pow(fn.r_f2, 1.6)),
      .mu_cv = -8.0 * fn.r_f * kc.int_vw / (25.0 * std::pow(kc.r_k, 1.6) * std::pow(fn.r_f2, 0.4)),
  };
}

double c_constant(const DensityFunctionals& fn, const KernelConstants& kc) {
  require_positive(fn);
  return std::pow(kc.r_k / (kc.mu2 * kc.mu2 * fn.r_f2), 0.2);
}

double a_constant(const DensityFunctionals& fn, const KernelConstants& kc) {
  require_positive(fn);
  return 8.0 * kc.r_v * fn.r_f * std::pow(kc.mu2, 0.8) /
         (25.0 * std::pow(kc.r_k, 1.8) * std::pow(fn.r_f2, 0.2));
}

std::uint64_t m_crit(const BiasConstants& bias) {
  if (!(bias.mu_cv < 0.0 && bias.mu_rescale > 0.0)) {
    throw DomainError("m_crit: requires mu_cv < 0 < mu_rescale");
  }
  const double m = std::pow(bias.mu_rescale / -bias.mu_cv, 5.0);
  if (!(m < 1.8e19)) throw DomainError("m_crit: value does not fit a 64-bit count");
  return static_cast<std::uint64_t>(std::ceil(m));
}

double amse_variance(const AmseInputs& in, double m) {
  const double inv_resamples = std::isinf(in.N) ? 0.0 : 1.0 / in.N;
  const double ratio = m / in.n;
  return in.A * in.C * in.C * std::pow(m, -0.2) * std::pow(in.n, -0.4) *
         (inv_resamples + ratio * ratio);
}

double amse_bias_sq(const AmseInputs& in, double m) {
  const double b = in.bias.mu_cv + in.bias.mu_rescale * std::pow(m, -0.2);
  return std::pow(m, -0.4) * std::pow(in.n, -0.4) * b * b;
}

double amse(const AmseInputs& in, double m) { return amse_variance(in, m) + amse_bias_sq(in, m); }

AmseMinimum minimize_amse(const AmseInputs& in) {
  if (!(in.n >= 2.0)) throw DomainError("minimize_amse: need n >= 2");
  if (!(in.N >= 1.0)) throw DomainError("minimize_amse: need N >= 1");
  if (!(in.A > 0.0 && in.C > 0.0)) throw DomainError("minimize_amse: need A, C > 0");

  const double n_max = std::floor(in.n);
  const double lo = std::log(2.0);
  const double hi = std::log(n_max);
  AmseMinimum out;
  if (hi <= lo) {
    out.m = 2;
    out.value = amse(in, 2.0);
    out.boundary = true;
    return out;
  }

  const double step = (hi - lo) / static_cast<double>(amse_grid_points - 1);
  auto on_log = [&](double t) { return amse(in, std::exp(t)); };
  std::size_t best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < amse_grid_points; ++k) {
    const double v = on_log(lo + step * static_cast<double>(k));
    if (v < best_v) best_v = v, best = k;
  }
  const double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
  const double b = lo + step * static_cast<double>(std::min(best + 1, amse_grid_points - 1));
  const auto [t_star, v_star] = detail::golden_section(on_log, a, b, 1e-10);
  (void)v_star;

  const double m_real = std::clamp(std::exp(t_star), 2.0, n_max);
  const double m_lo = std::floor(m_real);
  const double m_hi = std::min(std::ceil(m_real), n_max);
  const double v_lo = amse(in, m_lo);
  const double v_hi = amse(in, m_hi);
  const double m = v_hi < v_lo ? m_hi : m_lo;
  out.m = static_cast<std::size_t>(m);
  out.value = std::min(v_lo, v_hi);
  out.boundary = m >= n_max;
  return out;
}

AmseInputs AmseModel::inputs() const {
  return {A, C, bias, static_cast<double>(n), static_cast<double>(N)};
}

AmseModel amse_model(const DensityFunctionals& fn, const KernelConstants& kc, std::size_t n,
                     std::size_t N) {
  AmseModel model;
  model.A = a_constant(fn, kc);
  model.C = c_constant(fn, kc);
  model.bias = bias_constants(fn, kc);
  model.n = n;
  model.N = N;
  const AmseMinimum best = minimize_amse(model.inputs());
  model.m_hat = best.m;
  model.boundary_warning = best.boundary;
  return model;
}

AmseModel estimate_m0(const Sample& data, std::size_t n, std::size_t N, const M0Options& opts,
                      const KernelConstants& kc) {
  const std::size_t size = data.size();
  if (opts.s < 1) throw DomainError("estimate_m0: need s >= 1");
  const std::size_t r = opts.r != 0 ? opts.r : std::min(std::max<std::size_t>(500, n / 100), size - 1);
  if (r >= size) throw DomainError("estimate_m0: pilot size r must be smaller than the sample");
  if (r < 2) throw DomainError("estimate_m0: pilot size r must be at least 2");

  struct Pilot {
    double A = 0.0, C = 0.0, mu_cv = 0.0, mu_rescale = 0.0;
    std::size_t k = 0;
    bool failed = false;
  };
  std::vector<Pilot> pilots(opts.s);
  const std::uint64_t index_seed = derive_seed(opts.seed, 1);
  const std::uint64_t fit_seed = derive_seed(opts.seed, 2);
  const auto values = data.values();
  MixtureFitOptions fit = opts.fit;
  fit.threads = 1;

  parallel_for(opts.s, opts.threads, [&](std::size_t i) {
    try {
      const auto idx = subsample_indices(size, r, index_seed, i);
      std::vector<double> sub(r);
      for (std::size_t t = 0; t < r; ++t) sub[t] = values[idx[t]];
      const MixtureFit mf = fit_mixture_bic(Sample(std::move(sub)), derive_seed(fit_seed, i), fit);
      const DensityFunctionals fn = functionals_mixture(mf.mixture);
      const BiasConstants bc = bias_constants(fn, kc);
      pilots[i] = {a_constant(fn, kc), c_constant(fn, kc), bc.mu_cv, bc.mu_rescale, mf.k, false};
    } catch (const Error&) {
      pilots[i].failed = true;
    }
  });

  AmseModel model;
  model.n = n;
  model.N = N;
  model.s = opts.s;
  model.r = r;
  std::size_t ok = 0;
  for (const Pilot& p : pilots) {
    model.pilot_components.push_back(p.k);
    if (p.failed) {
      ++model.pilot_failures;
      continue;
    }
    ++ok;
    model.A += p.A;
    model.C += p.C;
    model.bias.mu_cv += p.mu_cv;
    model.bias.mu_rescale += p.mu_rescale;
  }
  if (5 * model.pilot_failures > opts.s || ok == 0) {
    throw NumericalError("estimate_m0: " + std::to_string(model.pilot_failures) + " of " +
                         std::to_string(opts.s) + " pilot fits failed");
  }
  const double inv = 1.0 / static_cast<double>(ok);
  model.A *= inv;
  model.C *= inv;
  model.bias.mu_cv *= inv;
  model.bias.mu_rescale *= inv;

  const AmseMinimum best = minimize_amse(model.inputs());
  model.m_hat = best.m;
  model.boundary_warning = best.boundary;
  return model;
}

AmseModel estimate_m0(const Sample& data, std::size_t n, std::size_t N, const M0Options& opts) {
  return estimate_m0(data, n, N, opts, gaussian_constants());
}

}  // namespace bagcv
