#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bagcv/amse.hpp"
#include "bagcv/density.hpp"
#include "bagcv/kernel.hpp"

namespace bagcv {

// ---- Table of bias constants -------------------------------------------------

struct Table1Row {
  std::string density;
  double mu_rescale = 0.0;
  double mu_cv = 0.0;
  std::uint64_t m_crit = 0;
  bool ok = false;
  std::string error;  ///< set when !ok
};

inline constexpr std::uint64_t m_crit_display_cap = 10'000'000;

/// beta55, std_normal, logistic, bimodal_T1, cauchy, claw. Mixtures use closed
/// forms; the others exact-derivative quadrature. A failing row is flagged and
/// the rest still computed.
std::vector<Table1Row> run_table1(const KernelConstants& kc = gaussian_constants());

/// m_crit as printed: ">1e7" above the display cap.
std::string m_crit_text(const Table1Row& row);
std::string table1_csv(std::span<const Table1Row> rows);

/// Closed-form derivatives for the non-mixture reference densities.
DensityDerivatives beta55_derivatives();
DensityDerivatives logistic_derivatives();
DensityDerivatives cauchy_derivatives();

// ---- Monte Carlo studies -----------------------------------------------------

struct StudySpec {
  std::string density_name = "D1";  ///< preset name, or "custom"
  GaussianMixture density = preset(Preset::D1);
  std::size_t n = 10000;
  std::size_t reps = 200;
  std::size_t N = 100;
  std::vector<std::size_t> m_list;
  /// Adds the minimize_amse output for the true density to m_list.
  bool include_analytic_m = false;
  std::uint64_t seed = 0;
  /// (s, r) for a per-replicate estimate_m0 run.
  std::optional<std::pair<std::size_t, std::size_t>> estimate_m0_params;
  unsigned threads = 0;

  /// Throws ConfigError for reps < 1, n < 2, N < 1 or any m outside [2, n].
  void validate() const;
  /// m_list plus the analytic m when requested, sorted and deduplicated.
  std::vector<std::size_t> resolved_m_list(const KernelConstants& kc = gaussian_constants()) const;
};

/// Replicate `rep` of a study draws its data from this seed.
std::uint64_t replicate_data_seed(const StudySpec& spec, std::size_t rep);

struct StudyRecord {
  std::size_t rep = 0;
  std::string method;  ///< loo | bagged | m0_hat | bagged_m0
  std::size_t m = 0;
  double value = 0.0;  ///< log(h/h_n0), or the estimate itself for m0_hat
};

struct SamplingStudy {
  double h0 = 0.0;
  std::vector<std::size_t> m_values;
  std::vector<StudyRecord> records;   ///< ordered by replicate
  std::vector<std::string> failures;  ///< one message per failed estimate
};

/// Per replicate: simulate, binned LOO CV with nb = n, bagged CV for each m
/// (nb_sub = m) and, when requested, estimate_m0 followed by bagging at m0_hat.
SamplingStudy run_sampling_study(const StudySpec& spec);
std::string sampling_csv(const SamplingStudy& study);

struct IseRecord {
  std::size_t rep = 0;
  std::size_t m = 0;
  double ratio = 0.0;  ///< ISE(bagged) / ISE(LOO)
};

struct IseSummary {
  std::size_t m = 0;
  std::size_t count = 0;
  double mean_ratio = 0.0;
  double prop_below_one = 0.0;
};

struct IseStudy {
  std::vector<std::size_t> m_values;
  std::vector<IseRecord> records;
  std::vector<IseSummary> summary;  ///< one per m
  std::vector<std::string> failures;
};

/// Same replicates and bandwidths as run_sampling_study; ISE on 2048 nodes.
IseStudy run_ise_study(const StudySpec& spec);
std::string ise_csv(const IseStudy& study);
std::string ise_summary_csv(const IseStudy& study);

// ---- Timing ------------------------------------------------------------------

struct TimingRow {
  std::size_t n = 0;
  std::string mode;  ///< binned_full | bagged
  std::size_t m = 0;
  std::size_t N = 0;
  double seconds = 0.0;
};

struct TimingOptions {
  std::size_t runs = 3;  ///< median reported
  bool warmup = true;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Binned full-sample CV (nb = n) against bagging (nb_sub = m) on standard
/// normal data of each size.
std::vector<TimingRow> run_timing_bench(std::span<const std::size_t> n_list, std::size_t m,
                                        std::size_t N, const TimingOptions& opts = {});
std::string timing_csv(std::span<const TimingRow> rows);

/// Shortest round-trip text for a double ("nan", "inf" for non-finite).
std::string format_number(double v);

}  // namespace bagcv
