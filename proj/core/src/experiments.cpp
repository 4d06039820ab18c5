#include "bagcv/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bagcv/bagging.hpp"
#include "bagcv/cv.hpp"
#include "bagcv/error.hpp"
#include "bagcv/parallel.hpp"
#include "bagcv/rng.hpp"

namespace bagcv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- Table of bias constants -------------------------------------------------

DensityDerivatives beta55_derivatives() {
  // 630 x^4 (1-x)^4 = sum_k c_k x^k on [0, 1], zero outside.
  static constexpr double c[9] = {0, 0, 0, 0, 630, -2520, 3780, -2520, 630};
  const auto poly = [](int r) {
    return [r](double x) {
      if (x < 0.0 || x > 1.0) return 0.0;
      double acc = 0.0;
      for (int k = 8; k >= r; --k) {
        double falling = 1.0;
        for (int j = 0; j < r; ++j) falling *= k - j;
        acc = acc * x + c[k] * falling;
      }
      return acc;
    };
  };
  return {poly(0), poly(2), poly(3)};
}

DensityDerivatives logistic_derivatives() {
  // With e = exp(-|x|): f = e/(1+e)^2, f'' = f(1 - 6f), f''' = f(1 - 2s)(1 - 12f)
  // where s is the logistic cdf and 1 - 2s = -sign(x)(1-e)/(1+e); written in e
  // to stay accurate in the tails.
  const auto f = [](double x) {
    const double e = std::exp(-std::abs(x));
    return e / ((1.0 + e) * (1.0 + e));
  };
  return {
      f,
      [f](double x) {
        const double v = f(x);
        return v * (1.0 - 6.0 * v);
      },
      [f](double x) {
        const double e = std::exp(-std::abs(x));
        const double v = f(x);
        return -std::copysign(1.0, x) * v * ((1.0 - e) / (1.0 + e)) * (1.0 - 12.0 * v);
      },
  };
}

DensityDerivatives cauchy_derivatives() {
  constexpr double inv_pi = std::numbers::inv_pi;
  return {
      [](double x) { return inv_pi / (1.0 + x * x); },
      [](double x) { return inv_pi * (6.0 * x * x - 2.0) / std::pow(1.0 + x * x, 3); },
      [](double x) { return inv_pi * 24.0 * x * (1.0 - x * x) / std::pow(1.0 + x * x, 4); },
  };
}

std::vector<Table1Row> run_table1(const KernelConstants& kc) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  struct Entry {
    const char* name;
    std::function<DensityFunctionals()> functionals;
  };
  const Entry entries[] = {
      {"beta55", [] { return functionals_quadrature(beta55_derivatives(), {0.0, 1.0}); }},
      {"std_normal", [] { return functionals_mixture(preset(Preset::std_normal)); }},
      {"logistic", [] { return functionals_quadrature(logistic_derivatives(), {-inf, inf}); }},
      {"bimodal_T1", [] { return functionals_mixture(preset(Preset::bimodal_T1)); }},
      {"cauchy", [] { return functionals_quadrature(cauchy_derivatives(), {-inf, inf}); }},
      {"claw", [] { return functionals_mixture(preset(Preset::D2_claw)); }},
  };
  std::vector<Table1Row> rows;
  for (const Entry& e : entries) {
    Table1Row row;
    row.density = e.name;
    try {
      const BiasConstants b = bias_constants(e.functionals(), kc);
      row.mu_rescale = b.mu_rescale;
      row.mu_cv = b.mu_cv;
      row.m_crit = m_crit(b);
      row.ok = true;
    } catch (const Error& err) {
      row.error = err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string m_crit_text(const Table1Row& row) {
  if (!row.ok) return "failed";
  if (row.m_crit > m_crit_display_cap) return ">1e7";
  return std::to_string(row.m_crit);
}

std::string table1_csv(std::span<const Table1Row> rows) {
  std::ostringstream out;
  out << "density,mu_rescale,mu_cv,m_crit\n";
  for (const Table1Row& r : rows) {
    out << r.density << ',' << (r.ok ? format_number(r.mu_rescale) : "nan") << ','
        << (r.ok ? format_number(r.mu_cv) : "nan") << ',' << m_crit_text(r) << '\n';
  }
  return out.str();
}

// ---- Monte Carlo studies -----------------------------------------------------

void StudySpec::validate() const {
  if (reps < 1) throw ConfigError("study: reps must be >= 1");
  if (n < 2) throw ConfigError("study: n must be >= 2");
  if (N < 1) throw ConfigError("study: N must be >= 1");
  for (std::size_t m : m_list) {
    if (m < 2 || m > n) throw ConfigError("study: every m must lie in [2, n]");
  }
  if (estimate_m0_params) {
    const auto [s, r] = *estimate_m0_params;
    if (s < 1 || r < 2 || r >= n) throw ConfigError("study: estimate_m0 needs s >= 1, 2 <= r < n");
  }
  density.validate();
}

std::vector<std::size_t> StudySpec::resolved_m_list(const KernelConstants& kc) const {
  std::vector<std::size_t> out = m_list;
  if (include_analytic_m) out.push_back(amse_model(functionals_mixture(density), kc, n, N).m_hat);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t replicate_data_seed(const StudySpec& spec, std::size_t rep) {
  return derive_seed(derive_seed(spec.seed, 0), rep);
}

namespace {

std::uint64_t replicate_bag_seed(const StudySpec& spec, std::size_t rep, std::size_t m) {
  return derive_seed(derive_seed(derive_seed(spec.seed, 1), rep), m);
}

std::uint64_t replicate_m0_seed(const StudySpec& spec, std::size_t rep) {
  return derive_seed(derive_seed(spec.seed, 2), rep);
}

double loo_bandwidth(const Sample& x) { return cv_minimize_binned(bin_sample(x, x.size())).h_opt; }

double bagged(const Sample& x, const StudySpec& spec, std::size_t rep, std::size_t m) {
  BagConfig cfg;
  cfg.m = m;
  cfg.n_resamples = spec.N;
  cfg.seed = replicate_bag_seed(spec, rep, m);
  cfg.threads = 1;
  return bagged_bandwidth(x, cfg).h_bag;
}

std::string failure(std::size_t rep, const std::string& what, const std::exception& e) {
  return "rep " + std::to_string(rep) + " " + what + ": " + e.what();
}

struct ReplicateOut {
  std::vector<StudyRecord> records;
  std::vector<std::string> failures;
};

}  // namespace

SamplingStudy run_sampling_study(const StudySpec& spec) {
  spec.validate();
  SamplingStudy study;
  study.h0 = h_mise(spec.density, spec.n);
  study.m_values = spec.resolved_m_list();

  std::vector<ReplicateOut> per_rep(spec.reps);
  parallel_for(spec.reps, spec.threads, [&](std::size_t rep) {
    ReplicateOut& out = per_rep[rep];
    const Sample x = mixture_sample(spec.density, spec.n, replicate_data_seed(spec, rep));
    try {
      out.records.push_back({rep, "loo", spec.n, std::log(loo_bandwidth(x) / study.h0)});
    } catch (const Error& e) {
      out.failures.push_back(failure(rep, "loo", e));
    }
    for (std::size_t m : study.m_values) {
      try {
        out.records.push_back({rep, "bagged", m, std::log(bagged(x, spec, rep, m) / study.h0)});
      } catch (const Error& e) {
        out.failures.push_back(failure(rep, "bagged m=" + std::to_string(m), e));
      }
    }
    if (spec.estimate_m0_params) {
      try {
        M0Options opts;
        opts.s = spec.estimate_m0_params->first;
        opts.r = spec.estimate_m0_params->second;
        opts.seed = replicate_m0_seed(spec, rep);
        opts.threads = 1;
        const std::size_t m0 = estimate_m0(x, spec.n, spec.N, opts).m_hat;
        out.records.push_back({rep, "m0_hat", m0, static_cast<double>(m0)});
        out.records.push_back({rep, "bagged_m0", m0, std::log(bagged(x, spec, rep, m0) / study.h0)});
      } catch (const Error& e) {
        out.failures.push_back(failure(rep, "m0", e));
      }
    }
  });
  for (auto& r : per_rep) {
    study.records.insert(study.records.end(), r.records.begin(), r.records.end());
    study.failures.insert(study.failures.end(), r.failures.begin(), r.failures.end());
  }
  return study;
}

std::string sampling_csv(const SamplingStudy& study) {
  std::ostringstream out;
  out << "rep,method,m,value\n";
  for (const StudyRecord& r : study.records) {
    out << r.rep << ',' << r.method << ',' << r.m << ',' << format_number(r.value) << '\n';
  }
  return out.str();
}

IseStudy run_ise_study(const StudySpec& spec) {
  spec.validate();
  IseStudy study;
  study.m_values = spec.resolved_m_list();

  struct Out {
    std::vector<IseRecord> records;
    std::vector<std::string> failures;
  };
  std::vector<Out> per_rep(spec.reps);
  parallel_for(spec.reps, spec.threads, [&](std::size_t rep) {
    Out& out = per_rep[rep];
    const Sample x = mixture_sample(spec.density, spec.n, replicate_data_seed(spec, rep));
    double ise_loo = 0.0;
    try {
      ise_loo = ise(x, loo_bandwidth(x), spec.density);
    } catch (const Error& e) {
      out.failures.push_back(failure(rep, "loo", e));
      return;
    }
    for (std::size_t m : study.m_values) {
      try {
        out.records.push_back({rep, m, ise(x, bagged(x, spec, rep, m), spec.density) / ise_loo});
      } catch (const Error& e) {
        out.failures.push_back(failure(rep, "bagged m=" + std::to_string(m), e));
      }
    }
  });
  for (auto& r : per_rep) {
    study.records.insert(study.records.end(), r.records.begin(), r.records.end());
    study.failures.insert(study.failures.end(), r.failures.begin(), r.failures.end());
  }
  for (std::size_t m : study.m_values) {
    IseSummary s;
    s.m = m;
    std::size_t below = 0;
    for (const IseRecord& r : study.records) {
      if (r.m != m) continue;
      ++s.count;
      s.mean_ratio += r.ratio;
      below += r.ratio < 1.0;
    }
    if (s.count > 0) {
      s.mean_ratio /= static_cast<double>(s.count);
      s.prop_below_one = static_cast<double>(below) / static_cast<double>(s.count);
    }
    study.summary.push_back(s);
  }
  return study;
}

std::string ise_csv(const IseStudy& study) {
  std::ostringstream out;
  out << "rep,m,ratio\n";
  for (const IseRecord& r : study.records) out << r.rep << ',' << r.m << ',' << format_number(r.ratio) << '\n';
  return out.str();
}

std::string ise_summary_csv(const IseStudy& study) {
  std::ostringstream out;
  out << "m,count,mean_ratio,prop_below_one\n";
  for (const IseSummary& s : study.summary) {
    out << s.m << ',' << s.count << ',' << format_number(s.mean_ratio) << ','
        << format_number(s.prop_below_one) << '\n';
  }
  return out.str();
}

// ---- Timing ------------------------------------------------------------------

std::vector<TimingRow> run_timing_bench(std::span<const std::size_t> n_list, std::size_t m,
                                        std::size_t N, const TimingOptions& opts) {
  if (opts.runs < 1) throw DomainError("run_timing_bench: need at least one run");
  std::vector<TimingRow> rows;
  const GaussianMixture normal = preset(Preset::std_normal);
  for (std::size_t n : n_list) {
    const Sample x = mixture_sample(normal, n, derive_seed(opts.seed, n));
    const auto time = [&](auto&& work) {
      if (opts.warmup) work();
      std::vector<double> t;
      for (std::size_t k = 0; k < opts.runs; ++k) {
        const auto start = std::chrono::steady_clock::now();
        work();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
      std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
      return t[t.size() / 2];
    };
    const double full = time([&] {
      return cv_minimize_binned(bin_sample(x, n), std::nullopt, opts.threads);
    });
    rows.push_back({n, "binned_full", n, 1, full});
    BagConfig cfg;
    cfg.m = m;
    cfg.n_resamples = N;
    cfg.seed = derive_seed(opts.seed, n + 1);
    cfg.threads = opts.threads;
    rows.push_back({n, "bagged", m, N, time([&] { return bagged_bandwidth(x, cfg); })});
  }
  return rows;
}

std::string timing_csv(std::span<const TimingRow> rows) {
  std::ostringstream out;
  out << "n,mode,m,N,seconds\n";
  for (const TimingRow& r : rows) {
    out << r.n << ',' << r.mode << ',' << r.m << ',' << r.N << ',' << format_number(r.seconds) << '\n';
  }
  return out.str();
}

}  // namespace bagcv
