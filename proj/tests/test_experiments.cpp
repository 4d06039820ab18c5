#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "bagcv/density.hpp"
#include "bagcv/error.hpp"
#include "bagcv/experiments.hpp"
#include "bagcv/json_io.hpp"
#include "bagcv/power_law.hpp"

using namespace bagcv;

TEST_CASE("power-law fits") {
  SUBCASE("bandwidth trend") {
    const std::vector<double> ns{557, 5579, 55793};
    const std::vector<double> ys{3.606, 2.129, 1.352};
    const PowerLawFit fit = fit_power_law(ns, ys);
    CHECK(fit.beta0 == doctest::Approx(13.69).epsilon(0.005));
    CHECK(fit.beta1 == doctest::Approx(-0.213).epsilon(0.005));
    CHECK(std::abs(extrapolate(fit, 5'579'346) - 0.501) < 0.005);
  }
  SUBCASE("timing trend") {
    const std::vector<double> ns{5579, 55793, 557934};
    const std::vector<double> ys{0.0102, 0.959, 103.08};
    CHECK(fit_power_law(ns, ys).beta1 == doctest::Approx(2.002).epsilon(0.005));
  }
  SUBCASE("exact power law and normal equations") {
    const std::vector<double> ns{10, 40, 250, 3000, 77777};
    std::vector<double> ys;
    for (double n : ns) ys.push_back(2.0 * std::sqrt(n));
    const PowerLawFit exact = fit_power_law(ns, ys);
    CHECK(std::abs(exact.beta0 - 2.0) < 1e-10);
    CHECK(std::abs(exact.beta1 - 0.5) < 1e-10);
    CHECK(exact.residual_ss < 1e-20);

    std::vector<double> noisy = ys;
    for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] *= 1.0 + 0.1 * ((i % 3) - 1.0);
    const PowerLawFit fit = fit_power_law(ns, noisy);
    double r_sum = 0.0;
    double r_dot = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double resid = std::log(noisy[i]) - std::log(fit.beta0) - fit.beta1 * std::log(ns[i]);
      r_sum += resid;
      r_dot += resid * std::log(ns[i]);
    }
    CHECK(std::abs(r_sum) < 1e-10);
    CHECK(std::abs(r_dot) < 1e-10);
    CHECK(fit.beta0 > 0.0);
  }
  SUBCASE("input checks") {
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    const std::vector<double> bad{1.0, -2.0};
    const std::vector<double> same{5.0, 5.0};
    CHECK_THROWS_AS(fit_power_law(one, one), DomainError);
    CHECK_THROWS_AS(fit_power_law(two, one), DomainError);
    CHECK_THROWS_AS(fit_power_law(two, bad), DomainError);
    CHECK_THROWS_AS(fit_power_law(same, two), DomainError);
  }
}

TEST_CASE("table of bias constants") {
  const auto rows = run_table1();
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) CHECK_MESSAGE(row.ok, row.density << ": " << row.error);

  const auto& logistic = rows[2];
  CHECK(logistic.density == "logistic");
  CHECK(std::abs(logistic.mu_rescale - 0.92556) < 1e-3);
  CHECK(std::abs(logistic.mu_cv + 0.25787) < 1e-3);
  CHECK(logistic.m_crit == 596);

  const auto& cauchy = rows[4];
  CHECK(cauchy.density == "cauchy");
  CHECK(std::abs(static_cast<double>(cauchy.m_crit) / 330154.0 - 1.0) < 0.01);

  const auto& claw = rows[5];
  CHECK(claw.density == "claw");
  CHECK(claw.m_crit > m_crit_display_cap);
  CHECK(m_crit_text(claw) == ">1e7");
  CHECK(m_crit_text(rows[1]) == "88");

  const std::string csv = table1_csv(rows);
  CHECK(csv.rfind("density,mu_rescale,mu_cv,m_crit\n", 0) == 0);
  CHECK(csv.find("\nclaw,") != std::string::npos);
  CHECK(csv.find(",>1e7\n") != std::string::npos);
}

TEST_CASE("reference derivatives") {
  const auto check = [](const DensityDerivatives& d, double x) {
    const double e = 1e-3;
    const double f2 = (d.f(x + e) - 2.0 * d.f(x) + d.f(x - e)) / (e * e);
    const double f3 = (d.f2(x + e) - d.f2(x - e)) / (2.0 * e);
    CHECK(d.f2(x) == doctest::Approx(f2).epsilon(1e-4));
    CHECK(d.f3(x) == doctest::Approx(f3).epsilon(1e-4));
  };
  for (double x : {-2.5, -0.3, 0.7, 4.0}) {
    check(logistic_derivatives(), x);
    check(cauchy_derivatives(), x);
  }
  for (double x : {0.2, 0.45, 0.8}) check(beta55_derivatives(), x);
  CHECK(beta55_derivatives().f(0.5) == doctest::Approx(630.0 / 256.0));
}

namespace {

StudySpec small_spec() {
  StudySpec spec;
  spec.density_name = "D1";
  spec.density = preset(Preset::D1);
  spec.n = 2000;
  spec.reps = 3;
  spec.N = 10;
  spec.m_list = {200, 400};
  spec.seed = 77;
  spec.threads = 1;
  return spec;
}

}  // namespace

TEST_CASE("study specification") {
  StudySpec spec = small_spec();
  CHECK_NOTHROW(spec.validate());
  spec.m_list = {1};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.m_list = {2001};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec();
  spec.reps = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);

  spec = small_spec();
  spec.m_list = {400, 200, 400};
  spec.include_analytic_m = true;
  const auto ms = spec.resolved_m_list();
  CHECK(ms.size() == 3);
  CHECK(std::is_sorted(ms.begin(), ms.end()));

  SUBCASE("JSON round trip") {
    spec.estimate_m0_params = std::pair<std::size_t, std::size_t>{5, 300};
    const StudySpec back = study_spec_from_json(nlohmann::json::parse(to_json(spec).dump()));
    CHECK(back.density_name == spec.density_name);
    CHECK(back.n == spec.n);
    CHECK(back.reps == spec.reps);
    CHECK(back.N == spec.N);
    CHECK(back.seed == spec.seed);
    CHECK(back.include_analytic_m);
    CHECK(back.resolved_m_list() == ms);
    REQUIRE(back.estimate_m0_params.has_value());
    CHECK(back.estimate_m0_params->second == 300);
  }
  SUBCASE("custom mixture and malformed input") {
    const auto j = nlohmann::json::parse(
        R"({"density": {"weights": [0.5, 0.5], "means": [-1, 1], "sds": [0.5, 0.5]},
            "n": 500, "reps": 2, "N": 4, "m_list": [50, "analytic"], "seed": 1})");
    const StudySpec custom = study_spec_from_json(j);
    CHECK(custom.density_name == "custom");
    CHECK(custom.density.components() == 2);
    CHECK(custom.include_analytic_m);
    CHECK_THROWS_AS(study_spec_from_json(nlohmann::json::parse(R"({"density": "nope"})")), ConfigError);
    CHECK_THROWS_AS(study_spec_from_json(nlohmann::json::parse(R"({"n": "ten"})")), ConfigError);
  }
}

TEST_CASE("sampling study") {
  StudySpec spec = small_spec();
  spec.estimate_m0_params = std::pair<std::size_t, std::size_t>{3, 500};
  const SamplingStudy a = run_sampling_study(spec);
  CHECK(a.h0 == doctest::Approx(h_mise(spec.density, spec.n)));
  CHECK(a.failures.empty());
  // Per replicate: loo, one bagged row per m, m0_hat and bagged_m0.
  CHECK(a.records.size() == 3 * 5);
  CHECK(a.records.front().method == "loo");
  for (std::size_t i = 1; i < a.records.size(); ++i) CHECK(a.records[i - 1].rep <= a.records[i].rep);

  const std::string csv = sampling_csv(a);
  CHECK(csv.rfind("rep,method,m,value\n", 0) == 0);

  spec.threads = 3;
  CHECK(sampling_csv(run_sampling_study(spec)) == csv);

  spec.reps = 1;
  spec.threads = 1;
  CHECK(sampling_csv(run_sampling_study(spec)) == sampling_csv(run_sampling_study(spec)));
}

TEST_CASE("ISE study") {
  StudySpec spec = small_spec();
  const IseStudy study = run_ise_study(spec);
  CHECK(study.records.size() == 3 * 2);
  REQUIRE(study.summary.size() == 2);
  for (const auto& r : study.records) CHECK(r.ratio > 0.0);
  CHECK(study.summary[0].count == 3);
  CHECK(ise_csv(study).rfind("rep,m,ratio\n", 0) == 0);
  CHECK(ise_summary_csv(study).rfind("m,count,mean_ratio,prop_below_one\n", 0) == 0);
  CHECK(to_json(study.summary[0]).contains("mean_ratio"));
}

TEST_CASE("integrated squared error") {
  const GaussianMixture f = preset(Preset::D1);
  const double h0 = h_mise(f, 1000);
  double at_h0 = 0.0;
  double at_5h0 = 0.0;
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const Sample x = mixture_sample(f, 1000, 300 + rep);
    const double a = ise(x, h0, f);
    CHECK(a >= 0.0);
    CHECK(a / ise(x, h0, f) == 1.0);
    at_h0 += a;
    at_5h0 += ise(x, 5.0 * h0, f);
  }
  CHECK(at_h0 <= at_5h0);
}

TEST_CASE("oversmoothed claw estimate keeps all five modes") {
  const GaussianMixture f = preset(Preset::D2_claw);
  const std::size_t n = 100'000;
  const double h = 2.72 * h_mise(f, n);
  const Sample x = mixture_sample(f, n, 5);
  std::vector<double> grid;
  for (int k = 0; k <= 800; ++k) grid.push_back(-2.0 + 4.0 * k / 800.0);
  const auto fhat = kde_evaluate(x, h, grid);
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    if (fhat[k] > fhat[k - 1] && fhat[k] >= fhat[k + 1]) peaks.push_back(grid[k]);
  }
  REQUIRE(peaks.size() == 5);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(peaks[j] - (j / 2.0 - 1.0)) < 0.1);
}

TEST_CASE("timing bench ordering at n = 1e5") {
  const std::vector<std::size_t> ns{100'000};
  TimingOptions opts;
  opts.runs = 1;
  opts.warmup = false;
  opts.seed = 2;
  const auto rows = run_timing_bench(ns, 1000, 500, opts);
  REQUIRE(rows.size() == 2);
  const TimingRow& full = rows[0].mode == "binned_full" ? rows[0] : rows[1];
  const TimingRow& bag = rows[0].mode == "bagged" ? rows[0] : rows[1];
  CHECK(full.mode == "binned_full");
  CHECK(bag.mode == "bagged");
  CHECK(bag.seconds < full.seconds);
  CHECK(timing_csv(rows).rfind("n,mode,m,N,seconds\n", 0) == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-10) == "-2.5e-10");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("shipped study configs parse and validate") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(BAGCV_TEST_CONFIGS)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    std::ifstream in(entry.path());
    const StudySpec spec = study_spec_from_json(nlohmann::json::parse(in));
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.resolved_m_list().size() >= 2);
    ++count;
  }
  CHECK(count >= 4);
}
