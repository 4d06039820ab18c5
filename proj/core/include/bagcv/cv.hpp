#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bagcv/sample.hpp"

namespace bagcv {

/// Outcome of a cross-validation bandwidth search.
struct CvResult {
  double h_opt = 0.0;
  double cv_min = 0.0;  ///< criterion value at h_opt
  double search_lo = 0.0;
  double search_hi = 0.0;
  /// Coarse-grid minimum sat on an endpoint; the selection is unreliable.
  bool boundary_hit = false;
  std::size_t evaluations = 0;
};

/// Pairs farther apart than this many bandwidths are skipped.
inline constexpr double pair_cutoff = 40.0;
inline constexpr std::size_t cv_grid_points = 25;
inline constexpr double cv_rel_tol = 1e-4;

/// gamma_n(u) = (n-1)/n (K*K)(u) - 2 K(u).
double cv_gamma(double u, std::size_t n) noexcept;

/// Leave-one-out least-squares CV criterion in its pairwise form
///   R(K)/(nh) + 1/(n(n-1)h) sum_{i != j} gamma_n((X_i - X_j)/h).
/// The pair sum is split into fixed blocks that are summed in order, so the
/// value does not depend on `threads`.
double cv_score(const Sample& data, double h, unsigned threads = 1);

/// [h_RoT/20, 2 h_RoT] with h_RoT = 1.06 min(sd, IQR/1.349) n^{-1/5}.
Interval default_cv_interval(const Sample& data);

/// Coarse log grid of cv_grid_points, then golden-section refinement (in log h)
/// between the neighbours of the best grid point.
CvResult minimize_bandwidth_criterion(const std::function<double(double)>& criterion,
                                      Interval interval);

CvResult cv_minimize(const Sample& data, std::optional<Interval> interval = std::nullopt,
                     unsigned threads = 1);

/// Simple (nearest-centre) binning on nb equal-width bins over [min, max].
struct BinnedSample {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t nb = 0;
  std::size_t n = 0;
  std::vector<std::uint32_t> counts;
  /// default_cv_interval of the raw data, kept for binned searches.
  Interval default_interval;

  double width() const noexcept { return (hi - lo) / static_cast<double>(nb); }
};

BinnedSample bin_sample(const Sample& data, std::size_t nb);

/// Ordered-pair counts per bin distance d = 0..max_d:
/// weight(0) = sum c_j (c_j - 1), weight(d) = 2 sum c_j c_{j+d}.
std::vector<std::uint64_t> distance_class_weights(const BinnedSample& b, std::size_t max_d,
                                                  unsigned threads = 1);

/// Binned criterion: the pair sum runs over distance classes d with
/// weight(d) gamma_n(width * d / h), stopping past pair_cutoff bandwidths.
double cv_score_binned(const BinnedSample& b, double h);

/// Same optimizer as cv_minimize. Coarse bins push the minimum to the lower
/// search bound; callers must surface CvResult::boundary_hit.
CvResult cv_minimize_binned(const BinnedSample& b, std::optional<Interval> interval = std::nullopt,
                            unsigned threads = 1);

}  // namespace bagcv
