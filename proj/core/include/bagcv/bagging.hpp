#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bagcv/sample.hpp"

namespace bagcv {

struct BagConfig {
  std::size_t m = 0;  ///< subsample size, 2 <= m <= n
  std::size_t n_resamples = 100;
  std::uint64_t seed = 0;
  /// Search interval for each subsample's (unrescaled) CV bandwidth;
  /// defaults to that subsample's default_cv_interval.
  std::optional<Interval> interval;
  bool binned_sub = true;
  std::optional<std::size_t> nb_sub;  ///< bins per subsample, default m
  unsigned threads = 0;               ///< 0 = all hardware threads
};

struct BagResult {
  double h_bag = 0.0;  ///< mean of per_resample, summed in resample order
  std::vector<double> per_resample;  ///< (m/n)^{1/5} h_m for each successful resample
  std::vector<std::size_t> failed;   ///< indices of resamples whose CV search threw
  std::size_t boundary_hits = 0;
  double elapsed_seconds = 0.0;
};

/// m distinct indices in [0, n) by partial Fisher-Yates on derived_stream(seed, i).
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, std::uint64_t seed,
                                           std::size_t i);

/// Average of N rescaled subsample CV bandwidths. Throws NumericalError when
/// more than 10% of the resamples fail.
BagResult bagged_bandwidth(const Sample& data, const BagConfig& cfg);

/// A C^2 m^{-1/5} n^{-2/5} (1/N + (m/n)^2); N may be +infinity.
double variance_formula(double m, double n, double N, double A, double C);

/// var_single (m/n)^2, the covariance of two resample bandwidths.
double covariance_formula(double m, double n, double var_single);

}  // namespace bagcv
