#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bagcv/density.hpp"
#include "bagcv/em.hpp"
#include "bagcv/error.hpp"

using namespace bagcv;

TEST_CASE("standard normal data selects one component") {
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Sample x = mixture_sample(preset(Preset::std_normal), 5000, seed);
    const MixtureFit fit = fit_mixture_bic(x, seed);
    good += fit.k == 1 && std::abs(fit.mixture.means[0]) < 0.05 && std::abs(fit.mixture.sds[0] - 1.0) < 0.05;
  }
  CHECK(good >= 9);
}

TEST_CASE("well separated bimodal data selects two components") {
  const Sample x = mixture_sample(preset(Preset::bimodal_T1), 5000, 4);
  const MixtureFit fit = fit_mixture_bic(x, 9);
  REQUIRE(fit.k == 2);
  auto means = fit.mixture.means;
  std::sort(means.begin(), means.end());
  CHECK(means[0] == doctest::Approx(-1.5).epsilon(0.1 / 1.5));
  CHECK(means[1] == doctest::Approx(1.5).epsilon(0.1 / 1.5));
}

TEST_CASE("nine observations with one component give the Gaussian MLE") {
  const Sample x({0.3, -1.2, 2.2, 0.9, 1.1, -0.4, 0.0, 1.7, -0.6});
  MixtureFitOptions opts;
  opts.max_components = 1;
  const MixtureFit fit = fit_mixture_bic(x, 1, opts);
  REQUIRE(fit.k == 1);
  double ss = 0.0;
  for (double v : x.values()) ss += (v - x.mean()) * (v - x.mean());
  CHECK(fit.mixture.weights[0] == doctest::Approx(1.0));
  CHECK(fit.mixture.means[0] == doctest::Approx(x.mean()).epsilon(1e-10));
  CHECK(fit.mixture.sds[0] == doctest::Approx(std::sqrt(ss / 9.0)).epsilon(1e-8));
}

TEST_CASE("EM log-likelihood never decreases") {
  const Sample x = mixture_sample(preset(Preset::D2_claw), 3000, 8);
  for (std::size_t k : {2u, 4u, 6u}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      Rng rng = derived_stream(77, k * 10 + s);
      GaussianMixture init = kmeanspp_init(x.values(), k, rng);
      if (init.components() != k) continue;
      const EmRun run = run_em(x.values(), init, MixtureFitOptions{}, 1e-4 * x.sd());
      for (std::size_t i = 1; i < run.loglik_trace.size(); ++i) {
        REQUIRE(run.loglik_trace[i] - run.loglik_trace[i - 1] >= -1e-9);
      }
    }
  }
}

TEST_CASE("selected model has the largest BIC and fits are reproducible") {
  const Sample x = mixture_sample(preset(Preset::D1), 4000, 12);
  MixtureFitOptions one;
  one.threads = 1;
  MixtureFitOptions four;
  four.threads = 4;
  const MixtureFit a = fit_mixture_bic(x, 5, one);
  const MixtureFit b = fit_mixture_bic(x, 5, four);
  for (const MixtureCandidate& c : a.candidates) {
    if (c.ok) CHECK(a.bic >= c.bic);
    CHECK(c.bic == doctest::Approx(2.0 * c.loglik - (3.0 * c.k - 1.0) * std::log(4000.0)));
  }
  CHECK(a.k == b.k);
  CHECK(a.mixture.means == b.mixture.means);
  CHECK(a.mixture.sds == b.mixture.sds);
  CHECK(a.mixture.weights == b.mixture.weights);
  CHECK_NOTHROW(a.mixture.validate());
}

TEST_CASE("candidate count follows the sample size") {
  const Sample x = mixture_sample(preset(Preset::D1), 35, 1);
  const MixtureFit fit = fit_mixture_bic(x, 1);
  CHECK(fit.candidates.size() == 3);
}
