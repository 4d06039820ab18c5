#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "bagcv/bagging.hpp"
#include "bagcv/cv.hpp"
#include "bagcv/density.hpp"
#include "bagcv/detail/golden.hpp"
#include "bagcv/error.hpp"

using namespace bagcv;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sample_variance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / (v.size() - 1);
}

}  // namespace

TEST_CASE("subsample indices") {
  SUBCASE("m = n gives a permutation") {
    auto idx = subsample_indices(5, 5, 7, 0);
    std::sort(idx.begin(), idx.end());
    CHECK(idx == std::vector<std::size_t>{0, 1, 2, 3, 4});
  }
  SUBCASE("deterministic per (seed, i)") {
    CHECK(subsample_indices(10'000, 100, 3, 17) == subsample_indices(10'000, 100, 3, 17));
    CHECK(subsample_indices(10'000, 100, 3, 17) != subsample_indices(10'000, 100, 3, 18));
    CHECK(subsample_indices(10'000, 100, 3, 17) != subsample_indices(10'000, 100, 4, 17));
  }
  SUBCASE("distinct and in range") {
    for (std::size_t m : {1u, 50u, 999u, 1000u}) {
      const auto idx = subsample_indices(1000, m, 1, 2);
      const std::set<std::size_t> unique(idx.begin(), idx.end());
      CHECK(unique.size() == m);
      CHECK(*unique.rbegin() < 1000);
    }
  }
  SUBCASE("inclusion frequency is m/n") {
    std::vector<std::size_t> hits(10, 0);
    const std::size_t draws = 100'000;
    for (std::size_t i = 0; i < draws; ++i) {
      for (std::size_t k : subsample_indices(10, 3, 2024, i)) ++hits[k];
    }
    for (std::size_t h : hits) CHECK(std::abs(static_cast<double>(h) / draws - 0.3) < 0.005);
  }
  CHECK_THROWS_AS(subsample_indices(4, 5, 0, 0), DomainError);
}

TEST_CASE("the sparse path draws the same indices as the dense path") {
  // Reference partial Fisher-Yates on a full permutation array.
  const std::size_t n = 4096;
  const std::size_t m = 511;  // m * 8 < n: sparse
  const auto a = subsample_indices(n, m, 77, 3);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = derived_stream(77, 3);
  std::vector<std::size_t> b(m);
  for (std::size_t t = 0; t < m; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, n - 1);
    std::swap(perm[t], perm[pick(rng)]);
    b[t] = perm[t];
  }
  CHECK(a == b);
}

TEST_CASE("m = n with one resample is the full-sample selector") {
  const Sample x = mixture_sample(preset(Preset::std_normal), 500, 1);
  BagConfig cfg;
  cfg.m = 500;
  cfg.n_resamples = 1;
  cfg.seed = 5;
  cfg.binned_sub = false;
  const BagResult r = bagged_bandwidth(x, cfg);
  CHECK(r.h_bag == cv_minimize(x).h_opt);

  cfg.binned_sub = true;
  CHECK(bagged_bandwidth(x, cfg).h_bag == cv_minimize_binned(bin_sample(x, 500)).h_opt);
}

TEST_CASE("one resample is the rescaled subsample bandwidth") {
  const Sample x = mixture_sample(preset(Preset::D1), 3000, 2);
  BagConfig cfg;
  cfg.m = 300;
  cfg.n_resamples = 1;
  cfg.seed = 11;
  const BagResult r = bagged_bandwidth(x, cfg);
  std::vector<double> sub;
  for (std::size_t k : subsample_indices(3000, 300, 11, 0)) sub.push_back(x[k]);
  const double h_m = cv_minimize_binned(bin_sample(Sample(sub), 300)).h_opt;
  CHECK(r.h_bag == doctest::Approx(std::pow(0.1, 0.2) * h_m).epsilon(1e-15));
}

TEST_CASE("result invariants") {
  const Sample x = mixture_sample(preset(Preset::D1), 5000, 3);
  BagConfig cfg;
  cfg.m = 400;
  cfg.n_resamples = 37;
  cfg.seed = 8;
  cfg.threads = 1;
  const BagResult one = bagged_bandwidth(x, cfg);
  REQUIRE(one.per_resample.size() == 37);
  CHECK(one.failed.empty());
  double total = 0.0;
  for (double h : one.per_resample) {
    CHECK(h > 0.0);
    total += h;
  }
  CHECK(one.h_bag == total / 37.0);
  CHECK(one.elapsed_seconds >= 0.0);

  SUBCASE("bit-identical across thread counts") {
    for (unsigned t : {2u, 4u, 7u}) {
      cfg.threads = t;
      const BagResult other = bagged_bandwidth(x, cfg);
      CHECK(other.h_bag == one.h_bag);
      CHECK(other.per_resample == one.per_resample);
      CHECK(other.boundary_hits == one.boundary_hits);
    }
  }
  SUBCASE("scale equivariance") {
    const BagResult scaled = bagged_bandwidth(x.affine(1.0, 2.5), cfg);
    CHECK(scaled.h_bag == doctest::Approx(2.5 * one.h_bag).epsilon(1e-3));
  }
  SUBCASE("exact subsample search") {
    cfg.binned_sub = false;
    cfg.n_resamples = 5;
    const BagResult exact = bagged_bandwidth(x, cfg);
    CHECK(exact.per_resample.size() == 5);
    CHECK(exact.h_bag == doctest::Approx(one.h_bag).epsilon(0.3));
  }
}

TEST_CASE("configuration errors") {
  const Sample x = mixture_sample(preset(Preset::std_normal), 100, 1);
  BagConfig cfg;
  cfg.m = 101;
  CHECK_THROWS_AS(bagged_bandwidth(x, cfg), DomainError);
  cfg.m = 1;
  CHECK_THROWS_AS(bagged_bandwidth(x, cfg), DomainError);
  cfg.m = 50;
  cfg.n_resamples = 0;
  CHECK_THROWS_AS(bagged_bandwidth(x, cfg), DomainError);
  cfg.n_resamples = 3;
  cfg.nb_sub = 1;
  CHECK_THROWS_AS(bagged_bandwidth(x, cfg), DomainError);
}

TEST_CASE("failed resamples") {
  // Pairs drawn entirely from the tied block have zero range and cannot be searched.
  auto make = [](std::size_t tied, std::size_t n) {
    std::vector<double> v(tied, 0.0);
    for (std::size_t i = tied; i < n; ++i) v.push_back(1.0 + static_cast<double>(i) / n);
    return Sample(v);
  };
  BagConfig cfg;
  cfg.m = 2;
  cfg.n_resamples = 200;
  cfg.seed = 3;

  SUBCASE("a few failures are skipped") {
    const BagResult r = bagged_bandwidth(make(200, 1000), cfg);
    CHECK_FALSE(r.failed.empty());
    CHECK(r.failed.size() * 10 <= 200);
    CHECK(r.per_resample.size() + r.failed.size() == 200);
  }
  SUBCASE("too many failures abort") {
    CHECK_THROWS_AS(bagged_bandwidth(make(700, 1000), cfg), NumericalError);
  }
}

TEST_CASE("variance and covariance formulas") {
  CHECK(variance_formula(100, 1000, 1, 1, 1) ==
        doctest::Approx(std::pow(100.0, -0.2) * std::pow(1000.0, -0.4) * 1.01));
  CHECK(variance_formula(300, 1e5, inf, 2.0, 1.5) ==
        doctest::Approx(2.0 * 2.25 * std::pow(300.0, 1.8) * std::pow(1e5, -2.4)));
  CHECK(variance_formula(300, 1e5, 1e15, 2.0, 1.5) ==
        doctest::Approx(variance_formula(300, 1e5, inf, 2.0, 1.5)).epsilon(1e-6));
  CHECK_THROWS_AS(variance_formula(11, 10, 1, 1, 1), DomainError);

  for (auto [n, N] : {std::pair{1e5, 500.0}, std::pair{1e6, 100.0}}) {
    const auto [log_m, value] = detail::golden_section(
        [&](double t) { return variance_formula(std::exp(t), n, N, 1.0, 1.0); }, std::log(2.0),
        std::log(n), 1e-12);
    CHECK(std::exp(log_m) == doctest::Approx(n / (3.0 * std::sqrt(N))).epsilon(1e-6));
  }
  CHECK(1e5 / (3.0 * std::sqrt(500.0)) == doctest::Approx(1490.7).epsilon(0.5 / 1490.7));

  CHECK(covariance_formula(1000, 1000, 0.7) == 0.7);
  CHECK(covariance_formula(100, 1000, 1.0) == doctest::Approx(0.01));
  CHECK_THROWS_AS(covariance_formula(5, 4, 1.0), DomainError);
}

TEST_CASE("bagged variance shrinks with N") {
  const std::size_t reps = 500;
  const std::size_t n = 5000;
  const std::size_t m = 500;
  const std::vector<std::size_t> ns{1, 5, 25, 100};
  std::vector<std::vector<double>> values(ns.size());
  std::size_t boundary = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const Sample x = mixture_sample(preset(Preset::std_normal), n, derive_seed(99, rep));
    for (std::size_t k = 0; k < ns.size(); ++k) {
      BagConfig cfg;
      cfg.m = m;
      cfg.n_resamples = ns[k];
      cfg.seed = derive_seed(100, rep);
      cfg.threads = 1;
      const BagResult r = bagged_bandwidth(x, cfg);
      boundary += r.boundary_hits;
      values[k].push_back(r.h_bag);
    }
  }
  std::vector<double> var;
  for (const auto& v : values) var.push_back(sample_variance(v));
  int inversions = 0;
  for (std::size_t k = 1; k < var.size(); ++k) inversions += var[k] >= var[k - 1];
  CHECK(inversions <= 1);
  // Relative to N = 1, the variance follows 1/N + (m/n)^2 within a factor 2.
  const double ratio_sq = 0.01;
  for (std::size_t k = 1; k < ns.size(); ++k) {
    const double predicted = (1.0 / ns[k] + ratio_sq) / (1.0 + ratio_sq);
    const double observed = var[k] / var[0];
    CHECK(observed < 2.0 * predicted);
    CHECK(observed > 0.5 * predicted);
  }
  CHECK(boundary < reps);
}
