#include "bagcv/sample.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "bagcv/error.hpp"

namespace bagcv {

namespace {

void validate(const std::vector<double>& v) {
  if (v.size() < 2) {
    throw DataError("sample needs at least 2 observations, got " + std::to_string(v.size()));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError("sample contains a non-finite value");
  }
}

}  // namespace

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  validate(values_);
  std::sort(values_.begin(), values_.end());
}

Sample::Sample(std::vector<double> sorted, SortedTag) : values_(std::move(sorted)) {
  validate(values_);
  assert(std::is_sorted(values_.begin(), values_.end()));
}

Sample Sample::from_sorted(std::vector<double> sorted) {
  return Sample(std::move(sorted), SortedTag{});
}

double Sample::mean() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(size());
}

double Sample::sd() const noexcept {
  const double mu = mean();
  double ss = 0.0;
  for (double x : values_) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(size() - 1));
}

double Sample::quantile(double p) const noexcept {
  const double pos = p * static_cast<double>(size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values_[lo] + frac * (values_[hi] - values_[lo]);
}

std::size_t Sample::tie_count() const noexcept {
  std::size_t ties = 0;
  for (std::size_t i = 1; i < size(); ++i) ties += values_[i] == values_[i - 1];
  return ties;
}

Sample Sample::affine(double shift, double scale) const {
  if (!(scale > 0.0)) throw DomainError("affine scale must be positive");
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [=](double x) { return shift + scale * x; });
  return Sample(std::move(out), SortedTag{});
}

}  // namespace bagcv
