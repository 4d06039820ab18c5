#include <algorithm>
#include <cmath>
#include <numbers>

#include "bagcv/cv.hpp"
#include "bagcv/detail/fast_exp.hpp"
#include "bagcv/error.hpp"
#include "bagcv/kernel.hpp"
#include "bagcv/parallel.hpp"

namespace bagcv {

namespace {

constexpr std::size_t classes_per_block = 256;

std::size_t max_class(const BinnedSample& b, double h) {
  const double reach = pair_cutoff * h / b.width();
  if (!(reach < static_cast<double>(b.nb - 1))) return b.nb - 1;
  return static_cast<std::size_t>(reach);
}

double binned_criterion(const BinnedSample& b, std::span<const std::uint64_t> weights, double h) {
  const double nn = static_cast<double>(b.n);
  const double c1 = (nn - 1.0) / nn * 0.5 * std::numbers::inv_sqrtpi;
  const double c2 = 2.0 * inv_sqrt_2pi;
  const double step = b.width() / h;
  const double a = -0.25 * step * step;
  const std::size_t d_max = std::min(max_class(b, h), weights.size() - 1);
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t d = 0; d <= d_max; ++d) {
    const double dd = static_cast<double>(d);
    const double e = detail::exp_nonpositive(a * dd * dd);
    acc += static_cast<double>(weights[d]) * (c1 * e - c2 * (e * e));
  }
  return 0.5 * std::numbers::inv_sqrtpi / (nn * h) + acc / (nn * (nn - 1.0) * h);
}

}  // namespace

BinnedSample bin_sample(const Sample& data, std::size_t nb) {
  if (nb < 2) throw DomainError("bin_sample: need at least 2 bins");
  BinnedSample b;
  b.lo = data.min();
  b.hi = data.max();
  if (!(b.hi > b.lo)) throw DomainError("bin_sample: data range is zero");
  b.nb = nb;
  b.n = data.size();
  b.counts.assign(nb, 0);
  b.default_interval = default_cv_interval(data);
  const double inv_width = 1.0 / b.width();
  for (double x : data.values()) {
    const auto j = static_cast<std::size_t>((x - b.lo) * inv_width);
    ++b.counts[std::min(j, nb - 1)];
  }
  return b;
}

std::vector<std::uint64_t> distance_class_weights(const BinnedSample& b, std::size_t max_d,
                                                  unsigned threads) {
  max_d = std::min(max_d, b.nb - 1);
  std::vector<std::uint64_t> w(max_d + 1, 0);
  const std::uint32_t* c = b.counts.data();
  const std::size_t nb = b.nb;

  std::uint64_t same = 0;
  for (std::size_t j = 0; j < nb; ++j) same += std::uint64_t{c[j]} * (c[j] - (c[j] > 0));
  w[0] = same;

  const std::size_t blocks = (max_d + classes_per_block - 1) / classes_per_block;
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const std::size_t d0 = 1 + blk * classes_per_block;
    const std::size_t d1 = std::min(max_d + 1, d0 + classes_per_block);
    for (std::size_t d = d0; d < d1; ++d) {
      std::uint64_t acc = 0;
      const std::uint32_t* shifted = c + d;
      const std::size_t len = nb - d;
      for (std::size_t j = 0; j < len; ++j) acc += std::uint64_t{c[j]} * shifted[j];
      w[d] = 2 * acc;
    }
  });
  return w;
}

double cv_score_binned(const BinnedSample& b, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("cv_score_binned: bandwidth must be positive");
  const auto w = distance_class_weights(b, max_class(b, h));
  return binned_criterion(b, w, h);
}

CvResult cv_minimize_binned(const BinnedSample& b, std::optional<Interval> interval,
                            unsigned threads) {
  const Interval iv = interval ? *interval : b.default_interval;
  if (!(iv.lo > 0.0) || !(iv.lo < iv.hi)) {
    throw DomainError("bandwidth search interval must satisfy 0 < lo < hi");
  }
  const auto w = distance_class_weights(b, max_class(b, iv.hi), threads);
  return minimize_bandwidth_criterion([&](double h) { return binned_criterion(b, w, h); }, iv);
}

}  // namespace bagcv
