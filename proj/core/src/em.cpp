#include "bagcv/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bagcv/detail/fast_exp.hpp"
#include "bagcv/error.hpp"
#include "bagcv/parallel.hpp"

namespace bagcv {

namespace {

const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Responsibilities are stored component-major, resp[j * n + i], so every
// per-component pass is a contiguous loop over the sample.

// E-step; fills responsibilities and returns the log-likelihood.
double e_step(std::span<const double> x, const GaussianMixture& f, std::vector<double>& resp,
              std::vector<double>& top, std::vector<double>& total) {
  const std::size_t k = f.components();
  const std::size_t n = x.size();
  const double* xs = x.data();
  double* tp = top.data();
  double* tt = total.data();
  for (std::size_t i = 0; i < n; ++i) tp[i] = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    const double bias = std::log(f.weights[j]) - std::log(f.sds[j]) - log_sqrt_2pi;
    const double scale = 1.0 / f.sds[j];
    const double mu = f.means[j];
    double* r = resp.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (xs[i] - mu) * scale;
      r[i] = bias - 0.5 * z * z;
      tp[i] = std::max(tp[i], r[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) tt[i] = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double* r = resp.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = detail::exp_nonpositive(r[i] - tp[i]);
      tt[i] += r[i];
    }
  }
  // Each normalizer lies in [1, k], so a product over 64 points stays finite
  // and one log per block replaces one per point.
  double loglik = 0.0;
#pragma omp simd reduction(+ : loglik)
  for (std::size_t i = 0; i < n; ++i) loglik += tp[i];
  for (std::size_t b = 0; b < n; b += 64) {
    const std::size_t e = std::min(n, b + 64);
    double prod = 1.0;
    for (std::size_t i = b; i < e; ++i) prod *= tt[i];
    loglik += std::log(prod);
  }
  for (std::size_t i = 0; i < n; ++i) tt[i] = 1.0 / tt[i];
  for (std::size_t j = 0; j < k; ++j) {
    double* r = resp.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) r[i] *= tt[i];
  }
  return loglik;
}

// M-step; returns false if a component collapsed.
bool m_step(std::span<const double> x, const std::vector<double>& resp, GaussianMixture& f,
            double sd_floor) {
  const std::size_t k = f.components();
  const std::size_t n = x.size();
  const double* xs = x.data();
  for (std::size_t j = 0; j < k; ++j) {
    const double* r = resp.data() + j * n;
    double mass = 0.0, sum = 0.0;
#pragma omp simd reduction(+ : mass, sum)
    for (std::size_t i = 0; i < n; ++i) {
      mass += r[i];
      sum += r[i] * xs[i];
    }
    if (!(mass > 1e-12 * static_cast<double>(n))) return false;
    const double mu = sum / mass;
    double sq = 0.0;
#pragma omp simd reduction(+ : sq)
    for (std::size_t i = 0; i < n; ++i) {
      const double d = xs[i] - mu;
      sq += r[i] * d * d;
    }
    f.means[j] = mu;
    f.weights[j] = mass / static_cast<double>(n);
    f.sds[j] = std::sqrt(sq / mass);
    if (!(f.sds[j] >= sd_floor)) return false;
  }
  return true;
}

}  // namespace

GaussianMixture kmeanspp_init(std::span<const double> x, std::size_t k, Rng& rng) {
  const std::size_t n = x.size();
  std::vector<double> centers;
  centers.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centers.push_back(x[pick(rng)]);
  std::vector<double> d2(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
      total += best;
    }
    if (!(total > 0.0)) return {};
    double u = unif(rng) * total;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      u -= d2[i];
      if (u <= 0.0 && d2[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(x[chosen]);
  }
  std::sort(centers.begin(), centers.end());

  // One hard-assignment M-step.
  std::vector<double> cnt(k, 0.0), sum(k, 0.0), sq(k, 0.0);
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (std::abs(x[i] - centers[j]) < std::abs(x[i] - centers[best])) best = j;
    }
    label[i] = best;
    cnt[best] += 1.0;
    sum[best] += x[i];
  }
  GaussianMixture f;
  f.weights.resize(k);
  f.means.resize(k);
  f.sds.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (cnt[j] == 0.0) return {};
    f.means[j] = sum[j] / cnt[j];
  }
  for (std::size_t i = 0; i < n; ++i) sq[label[i]] += (x[i] - f.means[label[i]]) * (x[i] - f.means[label[i]]);

  double mu = 0.0, var = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(n);
  for (double v : x) var += (v - mu) * (v - mu);
  const double fallback_sd = std::sqrt(var / static_cast<double>(n)) / static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j) {
    f.weights[j] = cnt[j] / static_cast<double>(n);
    const double sd = std::sqrt(sq[j] / cnt[j]);
    f.sds[j] = sd > 0.0 ? sd : fallback_sd;
  }
  return f;
}

EmRun run_em(std::span<const double> x, GaussianMixture init, const MixtureFitOptions& opts,
             double sd_floor) {
  EmRun run;
  run.mixture = std::move(init);
  std::vector<double> resp(x.size() * run.mixture.components());
  std::vector<double> top(x.size()), total(x.size());
  double prev = e_step(x, run.mixture, resp, top, total);
  run.loglik_trace.push_back(prev);
  while (run.iterations < opts.max_iterations) {
    if (!m_step(x, resp, run.mixture, sd_floor)) {
      run.degenerate = true;
      break;
    }
    ++run.iterations;
    const double cur = e_step(x, run.mixture, resp, top, total);
    run.loglik_trace.push_back(cur);
    const bool done = std::abs(cur - prev) < opts.rel_tol * std::abs(prev);
    prev = cur;
    if (done) {
      run.converged = true;
      break;
    }
  }
  run.loglik = prev;
  return run;
}

MixtureFit fit_mixture_bic(const Sample& data, std::uint64_t seed, MixtureFitOptions opts) {
  const auto x = data.values();
  const std::size_t n = x.size();
  const std::size_t k_max = std::max<std::size_t>(1, std::min(opts.max_components, n / 10));
  const double sd_floor = opts.sd_floor_factor * data.sd();
  const double log_n = std::log(static_cast<double>(n));

  std::vector<EmRun> best(k_max);
  std::vector<bool> ok(k_max, false);
  parallel_for(k_max, opts.threads, [&](std::size_t idx) {
    const std::size_t k = idx + 1;
    for (std::size_t rs = 0; rs < opts.restarts; ++rs) {
      Rng rng = derived_stream(seed, k * 1000 + rs);
      GaussianMixture init = kmeanspp_init(x, k, rng);
      if (init.components() != k) continue;
      EmRun run = run_em(x, std::move(init), opts, sd_floor);
      if (run.degenerate) continue;
      if (!ok[idx] || run.loglik > best[idx].loglik) {
        best[idx] = std::move(run);
        ok[idx] = true;
      }
    }
  });

  MixtureFit fit;
  fit.bic = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < k_max; ++idx) {
    const std::size_t k = idx + 1;
    MixtureCandidate c{.k = k, .ok = ok[idx]};
    if (!ok[idx]) {
      fit.warnings.push_back("k=" + std::to_string(k) + " skipped: every EM run was degenerate");
    } else {
      c.loglik = best[idx].loglik;
      c.bic = 2.0 * c.loglik - static_cast<double>(3 * k - 1) * log_n;
      if (c.bic > fit.bic) {
        fit.bic = c.bic;
        fit.loglik = c.loglik;
        fit.k = k;
        fit.mixture = best[idx].mixture;
      }
    }
    fit.candidates.push_back(c);
  }
  if (fit.k == 0) throw NumericalError("fit_mixture_bic: every candidate k was degenerate");

  // Renormalize away round-off so the result passes GaussianMixture::validate.
  double total = 0.0;
  for (double w : fit.mixture.weights) total += w;
  for (double& w : fit.mixture.weights) w /= total;
  return fit;
}

}  // namespace bagcv
