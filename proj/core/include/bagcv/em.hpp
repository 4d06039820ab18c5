#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bagcv/density.hpp"
#include "bagcv/rng.hpp"
#include "bagcv/sample.hpp"

namespace bagcv {

struct MixtureFitOptions {
  std::size_t max_components = 9;
  std::size_t restarts = 5;
  double rel_tol = 1e-8;
  std::size_t max_iterations = 500;
  /// A component sd below sd_floor_factor * sample sd marks the run degenerate.
  double sd_floor_factor = 1e-4;
  unsigned threads = 1;
};

struct EmRun {
  GaussianMixture mixture;
  double loglik = 0.0;
  std::vector<double> loglik_trace;  ///< one entry per E-step
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

/// k-means++ seeding followed by one hard-assignment M-step.
/// Returns an empty mixture when a cluster ends up empty.
GaussianMixture kmeanspp_init(std::span<const double> x, std::size_t k, Rng& rng);

/// EM from `init` until the relative log-likelihood change drops below
/// rel_tol or max_iterations is reached. Stops early, flagged degenerate, if a
/// component sd falls below `sd_floor`.
EmRun run_em(std::span<const double> x, GaussianMixture init, const MixtureFitOptions& opts,
             double sd_floor);

struct MixtureCandidate {
  std::size_t k = 0;
  bool ok = false;
  double loglik = 0.0;
  double bic = 0.0;  ///< 2 loglik - (3k - 1) log n
};

struct MixtureFit {
  GaussianMixture mixture;
  std::size_t k = 0;
  double loglik = 0.0;
  double bic = 0.0;
  std::vector<MixtureCandidate> candidates;
  std::vector<std::string> warnings;
};

/// EM fits for k = 1..K with K = min(max_components, max(1, n/10)), keeping the
/// best of `restarts` seeded runs per k, and returns the BIC maximizer.
/// Throws NumericalError when every k is degenerate.
MixtureFit fit_mixture_bic(const Sample& data, std::uint64_t seed, MixtureFitOptions opts = {});

}  // namespace bagcv
