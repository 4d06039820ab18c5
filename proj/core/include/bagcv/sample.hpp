#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bagcv {

/// Closed bandwidth (or abscissa) interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Immutable sorted sample of finite observations, n >= 2.
class Sample {
 public:
  /// Sorts `values`; throws DataError if n < 2 or any value is non-finite.
  explicit Sample(std::vector<double> values);

  /// Wraps values already known to be sorted. Checked in debug builds only.
  static Sample from_sorted(std::vector<double> sorted);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

  double mean() const noexcept;
  /// Standard deviation with the n-1 divisor.
  double sd() const noexcept;
  /// Linear-interpolation quantile (type 7), p in [0,1].
  double quantile(double p) const noexcept;
  double iqr() const noexcept { return quantile(0.75) - quantile(0.25); }
  /// Number of observations equal to their predecessor.
  std::size_t tie_count() const noexcept;

  /// a + c * x for every observation (c > 0 keeps the order).
  Sample affine(double shift, double scale) const;

 private:
  struct SortedTag {};
  Sample(std::vector<double> sorted, SortedTag);

  std::vector<double> values_;
};

}  // namespace bagcv
