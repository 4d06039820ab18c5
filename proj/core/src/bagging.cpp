#include "bagcv/bagging.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "bagcv/cv.hpp"
#include "bagcv/error.hpp"
#include "bagcv/parallel.hpp"
#include "bagcv/rng.hpp"

namespace bagcv {

namespace {

struct ResampleOutcome {
  double h = 0.0;
  bool boundary = false;
  bool failed = false;
};

}  // namespace

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, std::uint64_t seed,
                                           std::size_t i) {
  if (m > n) throw DomainError("subsample_indices: m must not exceed n");
  Rng rng = derived_stream(seed, i);
  std::vector<std::size_t> out(m);
  if (m == 0) return out;
  // Dense and sparse variants run the same swaps; only the storage differs.
  if (m * 8 >= n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t t = 0; t < m; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, n - 1);
      std::swap(perm[t], perm[pick(rng)]);
      out[t] = perm[t];
    }
  } else {
    std::unordered_map<std::size_t, std::size_t> moved;
    moved.reserve(2 * m);
    auto at = [&](std::size_t k) {
      const auto it = moved.find(k);
      return it == moved.end() ? k : it->second;
    };
    for (std::size_t t = 0; t < m; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, n - 1);
      const std::size_t j = pick(rng);
      const std::size_t vj = at(j);
      moved[j] = at(t);
      out[t] = vj;
    }
  }
  return out;
}

BagResult bagged_bandwidth(const Sample& data, const BagConfig& cfg) {
  const std::size_t n = data.size();
  if (cfg.m < 2 || cfg.m > n) throw DomainError("bagged_bandwidth: need 2 <= m <= n");
  if (cfg.n_resamples < 1) throw DomainError("bagged_bandwidth: need at least one resample");
  const std::size_t nb = cfg.nb_sub.value_or(cfg.m);
  if (cfg.binned_sub && nb < 2) throw DomainError("bagged_bandwidth: nb_sub must be >= 2");

  const auto start = std::chrono::steady_clock::now();
  const double rescale = std::pow(static_cast<double>(cfg.m) / static_cast<double>(n), 0.2);
  const auto values = data.values();

  std::vector<ResampleOutcome> outcome(cfg.n_resamples);
  parallel_for(cfg.n_resamples, cfg.threads, [&](std::size_t i) {
    try {
      const auto idx = subsample_indices(n, cfg.m, cfg.seed, i);
      std::vector<double> sub(idx.size());
      std::transform(idx.begin(), idx.end(), sub.begin(), [&](std::size_t k) { return values[k]; });
      std::sort(sub.begin(), sub.end());
      const Sample s = Sample::from_sorted(std::move(sub));
      const CvResult r = cfg.binned_sub ? cv_minimize_binned(bin_sample(s, nb), cfg.interval)
                                        : cv_minimize(s, cfg.interval);
      outcome[i] = {rescale * r.h_opt, r.boundary_hit, false};
    } catch (const Error&) {
      outcome[i].failed = true;
    }
  });

  BagResult res;
  res.per_resample.reserve(cfg.n_resamples);
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i].failed) {
      res.failed.push_back(i);
      continue;
    }
    res.per_resample.push_back(outcome[i].h);
    res.boundary_hits += outcome[i].boundary;
  }
  if (10 * res.failed.size() > cfg.n_resamples) {
    throw NumericalError("bagged_bandwidth: " + std::to_string(res.failed.size()) + " of " +
                         std::to_string(cfg.n_resamples) + " resamples failed");
  }
  double total = 0.0;
  for (double h : res.per_resample) total += h;
  res.h_bag = total / static_cast<double>(res.per_resample.size());
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

double variance_formula(double m, double n, double N, double A, double C) {
  if (m > n) throw DomainError("variance_formula: m must not exceed n");
  const double ratio = m / n;
  const double inv_resamples = std::isinf(N) ? 0.0 : 1.0 / N;
  return A * C * C * std::pow(m, -0.2) * std::pow(n, -0.4) * (inv_resamples + ratio * ratio);
}

double covariance_formula(double m, double n, double var_single) {
  if (m > n) throw DomainError("covariance_formula: m must not exceed n");
  const double ratio = m / n;
  return var_single * ratio * ratio;
}

}  // namespace bagcv
