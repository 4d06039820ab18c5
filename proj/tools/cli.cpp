#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bagcv/bagcv.hpp"

namespace bagcv::cli {

namespace {

constexpr std::uint64_t jitter_stream = 0x6a6974746572;  // "jitter"
constexpr std::size_t density_grid_points = 512;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Ingested ingest(const std::filesystem::path& path, const std::string& column, double jitter,
                std::optional<std::uint64_t> seed) {
  if (jitter < 0.0 || !std::isfinite(jitter)) throw ConfigError("jitter half-width must be >= 0");
  if (jitter > 0.0 && !seed) throw ConfigError("jitter needs --seed");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::optional<std::size_t> index;
  if (column.empty()) {
    index = 0;
  } else if (all_digits(column)) {
    index = static_cast<std::size_t>(std::stoull(column));
  }

  std::vector<double> values;
  std::vector<std::size_t> bad_lines;
  std::size_t bad_count = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (first) {
      first = false;
      if (!index) {
        const auto it = std::find(fields.begin(), fields.end(), column);
        if (it == fields.end()) throw DataError("column '" + column + "' not found in header");
        index = static_cast<std::size_t>(it - fields.begin());
        continue;
      }
      if (*index < fields.size() && !parse_real(fields[*index])) continue;  // header
    }
    const auto v = *index < fields.size() ? parse_real(fields[*index]) : std::nullopt;
    if (!v) {
      ++bad_count;
      if (bad_lines.size() < 5) bad_lines.push_back(line_no);
      continue;
    }
    values.push_back(*v);
  }
  if (bad_count > 0) {
    std::ostringstream msg;
    msg << bad_count << " unparsable row(s) in " << path.string() << ", first at line(s)";
    for (std::size_t l : bad_lines) msg << ' ' << l;
    throw DataError(msg.str());
  }
  if (values.size() < 2) throw DataError("need at least two observations, got " + std::to_string(values.size()));

  std::sort(values.begin(), values.end());
  std::size_t ties = 0;
  for (std::size_t i = 1; i < values.size(); ++i) ties += values[i] == values[i - 1];
  if (jitter > 0.0) {
    // Noise is assigned in sorted order, so the result depends only on the
    // multiset of values and the seed.
    Rng rng = derived_stream(*seed, jitter_stream);
    std::uniform_real_distribution<double> noise(-jitter, jitter);
    for (double& x : values) x += noise(rng);
    std::sort(values.begin(), values.end());
  }
  return {Sample::from_sorted(std::move(values)), ties};
}

namespace {

struct RunConfig {
  std::string input;
  std::string column;
  double jitter = 0.0;
  std::optional<std::size_t> m;
  std::size_t N = 100;
  std::size_t s = 50;
  std::size_t r = 0;
  std::optional<std::size_t> nb;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string output;
  bool exact = false;
  bool no_timing = false;
  std::optional<double> bandwidth;
  // sim
  std::string config;
  std::string study = "sampling";
  // bench
  std::vector<std::size_t> n_list{100000, 1000000};
  std::size_t runs = 3;
  // calibrate-rv
  std::size_t replicates = 1000;
  std::string write_constants;
};

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw ConfigError("cannot write " + cfg.output);
  f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ConfigError("--seed is required for this command");
  return *cfg.seed;
}

std::optional<Interval> interval_of(const RunConfig& cfg) {
  if (!cfg.lower && !cfg.upper) return std::nullopt;
  if (!cfg.lower || !cfg.upper) throw ConfigError("--lower and --upper go together");
  if (!(*cfg.lower > 0.0 && *cfg.lower < *cfg.upper)) throw ConfigError("need 0 < --lower < --upper");
  return Interval{*cfg.lower, *cfg.upper};
}

Ingested load(const RunConfig& cfg, std::ostream& err) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  Ingested in = ingest(cfg.input, cfg.column, cfg.jitter, cfg.seed);
  err << "read n=" << in.sample.size() << " (ties before jitter: " << in.ties_before_jitter << ")\n";
  return in;
}

M0Options m0_options(const RunConfig& cfg) {
  M0Options o;
  o.s = cfg.s;
  o.r = cfg.r;
  o.seed = derive_seed(require_seed(cfg), 0x6d30);
  o.threads = cfg.threads;
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Selection {
  ordered_json report;
  double h = 0.0;
  bool unreliable = false;
};

Selection select_bandwidth(const RunConfig& cfg, const Ingested& in, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = require_seed(cfg);
  const std::size_t n = in.sample.size();

  ordered_json j;
  j["command"] = "select";
  j["version"] = version();
  j["input"] = cfg.input;
  j["n"] = n;
  j["ties_before_jitter"] = in.ties_before_jitter;
  j["jitter"] = cfg.jitter;

  std::optional<AmseModel> model;
  std::size_t m = 0;
  if (cfg.m) {
    m = *cfg.m;
    if (m < 2 || m > n) throw ConfigError("--m must lie in [2, n]");
  } else {
    model = estimate_m0(in.sample, n, cfg.N, m0_options(cfg));
    m = model->m_hat;
    err << "estimated m0=" << m << (model->boundary_warning ? " (at n: bagging degenerates)" : "")
        << '\n';
  }

  BagConfig bag;
  bag.m = m;
  bag.n_resamples = cfg.N;
  bag.seed = derive_seed(seed, 0x626167);
  bag.interval = interval_of(cfg);
  bag.binned_sub = !cfg.exact;
  bag.nb_sub = cfg.nb;
  bag.threads = cfg.threads;
  const BagResult res = bagged_bandwidth(in.sample, bag);

  j["bandwidth"] = res.h_bag;
  j["m"] = m;
  j["N"] = cfg.N;
  j["mode"] = cfg.exact ? "exact" : "binned";
  if (!cfg.exact) j["nb_sub"] = cfg.nb.value_or(m);
  j["boundary_hits"] = res.boundary_hits;
  j["failed_resamples"] = res.failed.size();
  j["seed"] = seed;
  if (model) j["m0"] = to_json(*model);
  if (!cfg.no_timing) j["elapsed_seconds"] = seconds_since(t0);

  Selection sel{std::move(j), res.h_bag, 2 * res.boundary_hits > cfg.N};
  err << "bandwidth=" << res.h_bag << " m=" << m << " N=" << cfg.N
      << " boundary_hits=" << res.boundary_hits << '\n';
  if (sel.unreliable) {
    err << "error: more than half of the resamples hit the search boundary; "
           "selection unreliable (widen --lower/--upper or increase --nb)\n";
  }
  return sel;
}

int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_seed(cfg);
  const Ingested in = load(cfg, err);
  const Selection sel = select_bandwidth(cfg, in, err);
  emit(cfg, dump(sel.report), out);
  return sel.unreliable ? numerical : ok;
}

int cmd_m0(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  require_seed(cfg);
  const Ingested in = load(cfg, err);
  const AmseModel model = estimate_m0(in.sample, in.sample.size(), cfg.N, m0_options(cfg));
  ordered_json j;
  j["command"] = "m0";
  j["version"] = version();
  j["input"] = cfg.input;
  j["n"] = in.sample.size();
  j["N"] = cfg.N;
  j["seed"] = *cfg.seed;
  j["model"] = to_json(model);
  if (!cfg.no_timing) j["elapsed_seconds"] = seconds_since(t0);
  emit(cfg, dump(j), out);
  err << "m0=" << model.m_hat << " (s=" << model.s << ", r=" << model.r
      << ", failed pilots=" << model.pilot_failures << ")\n";
  if (model.boundary_warning) err << "warning: AMSE minimizer at m=n\n";
  return ok;
}

int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Ingested in = load(cfg, err);
  double h = 0.0;
  bool unreliable = false;
  if (!cfg.bandwidth) require_seed(cfg);
  if (cfg.bandwidth) {
    h = *cfg.bandwidth;
    if (!(h > 0.0)) throw ConfigError("--bandwidth must be positive");
  } else {
    const Selection sel = select_bandwidth(cfg, in, err);
    h = sel.h;
    unreliable = sel.unreliable;
  }
  const double lo = in.sample.min() - 3.0 * h;
  const double hi = in.sample.max() + 3.0 * h;
  std::vector<double> xs(density_grid_points);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(xs.size() - 1);
  }
  const std::vector<double> fx = kde_evaluate(in.sample, h, xs);
  std::ostringstream csv;
  csv << "x,density\n";
  for (std::size_t k = 0; k < xs.size(); ++k) csv << format_number(xs[k]) << ',' << format_number(fx[k]) << '\n';
  emit(cfg, csv.str(), out);
  err << "density on " << xs.size() << " points, h=" << h << '\n';
  return unreliable ? numerical : ok;
}

int cmd_sim(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.study == "table1") {
    const auto rows = run_table1();
    emit(cfg, table1_csv(rows), out);
    bool all_ok = true;
    for (const auto& r : rows) {
      if (!r.ok) err << r.density << ": " << r.error << '\n';
      all_ok = all_ok && r.ok;
    }
    return all_ok ? ok : numerical;
  }
  if (cfg.config.empty()) throw ConfigError("--config is required for this study");
  std::ifstream f(cfg.config);
  if (!f) throw ConfigError("cannot read " + cfg.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.contains("seed") && !cfg.seed) throw ConfigError("study needs a seed (config or --seed)");
  StudySpec spec = study_spec_from_json(j);
  if (cfg.seed) spec.seed = *cfg.seed;
  spec.threads = cfg.threads;

  std::vector<std::string> failures;
  if (cfg.study == "sampling") {
    const SamplingStudy s = run_sampling_study(spec);
    emit(cfg, sampling_csv(s), out);
    failures = s.failures;
    err << "h0=" << s.h0 << ", " << s.records.size() << " records\n";
  } else if (cfg.study == "ise") {
    const IseStudy s = run_ise_study(spec);
    emit(cfg, ise_csv(s), out);
    failures = s.failures;
    err << ise_summary_csv(s);
  } else {
    throw ConfigError("--study must be sampling, ise or table1");
  }
  for (const auto& msg : failures) err << "failed: " << msg << '\n';
  return ok;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  TimingOptions opts;
  opts.runs = cfg.runs;
  opts.seed = require_seed(cfg);
  opts.threads = cfg.threads;
  const std::size_t m = cfg.m.value_or(1000);
  for (std::size_t n : cfg.n_list) {
    if (m > n) throw ConfigError("--m exceeds a benchmark size");
  }
  const auto rows = run_timing_bench(cfg.n_list, m, cfg.N, opts);
  emit(cfg, timing_csv(rows), out);
  err << "timed " << rows.size() << " configurations\n";
  return ok;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.replicates < 500) throw ConfigError("--replicates must be at least 500");
  const auto t0 = std::chrono::steady_clock::now();
  const RvCalibration cal = calibrate_rv_report(require_seed(cfg), cfg.replicates, cfg.threads);
  ordered_json j = to_json(cal);
  if (!cfg.no_timing) j["elapsed_seconds"] = seconds_since(t0);
  emit(cfg, dump(j), out);
  err << "r_v=" << cal.r_v << " (n=1000: " << cal.r_v_by_size[0] << ", n=2000: " << cal.r_v_by_size[1]
      << "), D1 m0=" << cal.d1_m0 << ", claw m0=" << cal.claw_m0 << '\n';
  if (!cal.consistent) {
    err << "error: estimates disagree by " << 100.0 * cal.disagreement << "% (limit 25%)\n";
    return numerical;
  }
  if (!cfg.write_constants.empty()) {
    KeyValues kv{
        {"r_v", format_number(cal.r_v)},
        {"seed", std::to_string(cal.seed)},
        {"replicates", std::to_string(cal.replicates)},
        {"density", "std_normal"},
        {"sizes", "1000,2000"},
        {"a_hat_1000", format_number(cal.a_hat[0])},
        {"a_hat_2000", format_number(cal.a_hat[1])},
        {"r_v_1000", format_number(cal.r_v_by_size[0])},
        {"r_v_2000", format_number(cal.r_v_by_size[1])},
        {"disagreement", format_number(cal.disagreement)},
        {"d1_m0", std::to_string(cal.d1_m0)},
        {"d1_within_10pct", cal.d1_within_10pct ? "true" : "false"},
        {"claw_m0", std::to_string(cal.claw_m0)},
        {"r_v_asymptotic", format_number(cal.r_v_asymptotic)},
    };
    write_key_values(cfg.write_constants, kv,
                     std::string("Gaussian kernel R(V), written by `bagcv calibrate-rv --seed ") +
                         std::to_string(cal.seed) + " --replicates " + std::to_string(cal.replicates) +
                         "`.\nRebuild after changing r_v; it is compiled into the library.");
    err << "wrote " << cfg.write_constants << '\n';
  }
  return ok;
}

void add_input_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "Data file (one value per line, or CSV)")->required();
  sub->add_option("--column", cfg.column, "Header name or 0-based column index");
  sub->add_option("--jitter", cfg.jitter, "Add Uniform(-j, j) noise to break ties")->check(CLI::NonNegativeNumber);
}

void add_selection_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--m", cfg.m, "Subsample size (default: estimated m0)");
  sub->add_option("--N", cfg.N, "Number of subsamples")->check(CLI::PositiveNumber);
  sub->add_option("--s", cfg.s, "Pilot subsamples for m0")->check(CLI::PositiveNumber);
  sub->add_option("--r", cfg.r, "Pilot subsample size (default max(500, n/100))");
  sub->add_option("--nb", cfg.nb, "Bins per subsample (default m)");
  sub->add_flag("--exact", cfg.exact, "Exact pairwise CV in each subsample instead of binned");
  sub->add_option("--lower", cfg.lower, "Lower end of the subsample CV search interval");
  sub->add_option("--upper", cfg.upper, "Upper end of the subsample CV search interval");
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = all); results do not depend on it");
  sub->add_option("--output", cfg.output, "Output file (default stdout)");
  sub->add_flag("--no-timing", cfg.no_timing, "Omit elapsed_seconds so reruns are byte-identical");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bagged cross-validation bandwidth selection for kernel density estimation", "bagcv"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  RunConfig cfg;

  auto* select = app.add_subcommand("select", "Bagged CV bandwidth");
  add_input_options(select, cfg);
  add_selection_options(select, cfg);
  add_common_options(select, cfg);

  auto* m0 = app.add_subcommand("m0", "Estimate the AMSE-optimal subsample size");
  add_input_options(m0, cfg);
  m0->add_option("--N", cfg.N, "Number of subsamples the bagged bandwidth will use")->check(CLI::PositiveNumber);
  m0->add_option("--s", cfg.s, "Pilot subsamples")->check(CLI::PositiveNumber);
  m0->add_option("--r", cfg.r, "Pilot subsample size (default max(500, n/100))");
  add_common_options(m0, cfg);

  auto* density = app.add_subcommand("density", "Kernel density estimate on a 512-point grid (CSV)");
  add_input_options(density, cfg);
  add_selection_options(density, cfg);
  density->add_option("--bandwidth", cfg.bandwidth, "Use this bandwidth instead of selecting one");
  add_common_options(density, cfg);

  auto* sim = app.add_subcommand("sim", "Run a simulation study (CSV)");
  sim->add_option("--config", cfg.config, "Study spec (JSON)");
  sim->add_option("--study", cfg.study, "sampling | ise | table1")
      ->check(CLI::IsMember({"sampling", "ise", "table1"}));
  add_common_options(sim, cfg);

  auto* bench = app.add_subcommand("bench", "Binned full CV against bagging, wall time (CSV)");
  bench->add_option("--n", cfg.n_list, "Sample sizes")->delimiter(',');
  bench->add_option("--m", cfg.m, "Subsample size (default 1000)");
  bench->add_option("--N", cfg.N, "Number of subsamples")->check(CLI::PositiveNumber);
  bench->add_option("--runs", cfg.runs, "Timed runs per configuration (median)")->check(CLI::PositiveNumber);
  add_common_options(bench, cfg);

  auto* calibrate = app.add_subcommand("calibrate-rv", "Monte Carlo calibration of the kernel constant R(V)");
  calibrate->add_option("--replicates", cfg.replicates, "Replicates per sample size (>= 500)");
  calibrate->add_option("--write", cfg.write_constants, "Also write the key=value constants file");
  add_common_options(calibrate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return usage;
  }

  try {
    if (select->parsed()) return cmd_select(cfg, out, err);
    if (m0->parsed()) return cmd_m0(cfg, out, err);
    if (density->parsed()) return cmd_density(cfg, out, err);
    if (sim->parsed()) return cmd_sim(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    if (calibrate->parsed()) return cmd_calibrate(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return numerical;
  }
  return usage;
}

}  // namespace bagcv::cli
