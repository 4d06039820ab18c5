#include "bagcv/cv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bagcv/detail/fast_exp.hpp"
#include "bagcv/detail/golden.hpp"
#include "bagcv/error.hpp"
#include "bagcv/kernel.hpp"
#include "bagcv/parallel.hpp"

namespace bagcv {

namespace {

constexpr std::size_t rows_per_block = 128;
constexpr double selfconv_norm = 0.5 * std::numbers::inv_sqrtpi;  // (K*K)(0)

// sum_{i<j in rows [r0, r1)} gamma_n((x_j - x_i)/h), skipping |x_j - x_i| > cutoff h.
double pair_block_sum(std::span<const double> x, std::size_t r0, std::size_t r1, double h,
                      double c1, double c2) {
  const double a = -0.25 / (h * h);
  const double reach = pair_cutoff * h;
  const std::size_t n = x.size();
  double total = 0.0;
  std::size_t end = r0 + 1;
  for (std::size_t i = r0; i < r1; ++i) {
    const double xi = x[i];
    end = std::max(end, i + 1);
    while (end < n && x[end] - xi <= reach) ++end;
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t j = i + 1; j < end; ++j) {
      const double d = x[j] - xi;
      const double e = detail::exp_nonpositive(a * d * d);
      acc += c1 * e - c2 * (e * e);
    }
    total += acc;
  }
  return total;
}

}  // namespace

double cv_gamma(double u, std::size_t n) noexcept {
  const double nn = static_cast<double>(n);
  return (nn - 1.0) / nn * kernel_selfconv(u) - 2.0 * kernel_eval(u);
}

double cv_score(const Sample& data, double h, unsigned threads) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("cv_score: bandwidth must be positive");
  const std::size_t n = data.size();
  const double nn = static_cast<double>(n);
  // gamma_n(u) = c1 e - c2 e^2 with e = exp(-u^2/4).
  const double c1 = (nn - 1.0) / nn * selfconv_norm;
  const double c2 = 2.0 * inv_sqrt_2pi;

  const std::size_t blocks = (n + rows_per_block - 1) / rows_per_block;
  std::vector<double> partial(blocks, 0.0);
  const auto x = data.values();
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t r0 = b * rows_per_block;
    partial[b] = pair_block_sum(x, r0, std::min(n, r0 + rows_per_block), h, c1, c2);
  });
  double half = 0.0;
  for (double p : partial) half += p;

  return selfconv_norm / (nn * h) + 2.0 * half / (nn * (nn - 1.0) * h);
}

Interval default_cv_interval(const Sample& data) {
  double scale = std::min(data.sd(), data.iqr() / 1.349);
  if (!(scale > 0.0)) scale = data.sd();
  if (!(scale > 0.0)) throw DomainError("default_cv_interval: sample has zero spread");
  const double h_rot = 1.06 * scale * std::pow(static_cast<double>(data.size()), -0.2);
  return {h_rot / 20.0, 2.0 * h_rot};
}

CvResult minimize_bandwidth_criterion(const std::function<double(double)>& criterion,
                                      Interval interval) {
  if (!(interval.lo > 0.0) || !(interval.lo < interval.hi) || !std::isfinite(interval.hi)) {
    throw DomainError("bandwidth search interval must satisfy 0 < lo < hi");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  CvResult res;
  res.search_lo = interval.lo;
  res.search_hi = interval.hi;

  const double log_lo = std::log(interval.lo);
  const double step = (std::log(interval.hi) - log_lo) / static_cast<double>(cv_grid_points - 1);
  std::array<double, cv_grid_points> grid{};
  std::array<double, cv_grid_points> value{};

  double best_h = 0.0;
  double best_v = inf;
  auto eval = [&](double h) {
    double v = criterion(h);
    ++res.evaluations;
    if (!std::isfinite(v)) v = inf;
    if (v < best_v) {
      best_v = v;
      best_h = h;
    }
    return v;
  };

  for (std::size_t k = 0; k < cv_grid_points; ++k) {
    grid[k] = k + 1 == cv_grid_points ? interval.hi
              : k == 0                ? interval.lo
                                      : std::exp(log_lo + step * static_cast<double>(k));
    value[k] = eval(grid[k]);
  }
  if (best_v == inf) throw NumericalError("CV criterion is non-finite on the whole search grid");

  const auto k_best = static_cast<std::size_t>(
      std::min_element(value.begin(), value.end()) - value.begin());
  res.boundary_hit = k_best == 0 || k_best + 1 == cv_grid_points;

  // Golden section in log h on [grid[k-1], grid[k+1]] (clamped at the ends).
  detail::golden_section([&](double t) { return eval(std::exp(t)); },
                         std::log(grid[k_best == 0 ? 0 : k_best - 1]),
                         std::log(grid[std::min(k_best + 1, cv_grid_points - 1)]), cv_rel_tol);

  res.h_opt = best_h;
  res.cv_min = best_v;
  return res;
}

CvResult cv_minimize(const Sample& data, std::optional<Interval> interval, unsigned threads) {
  const Interval iv = interval ? *interval : default_cv_interval(data);
  return minimize_bandwidth_criterion([&](double h) { return cv_score(data, h, threads); }, iv);
}

}  // namespace bagcv
