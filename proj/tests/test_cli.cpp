#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bagcv/cv.hpp"
#include "bagcv/density.hpp"
#include "bagcv/error.hpp"
#include "bagcv/experiments.hpp"
#include "cli.hpp"

using namespace bagcv;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const char* env = std::getenv("BAGCV_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "bagcv_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = tmp_dir() / name;
  std::ofstream(p) << text;
  return p;
}

fs::path normal_file(std::size_t n, std::uint64_t seed) {
  std::ostringstream s;
  // Unsorted order, as real files come.
  Rng rng = derived_stream(seed, 0);
  for (double v : mixture_draw(preset(Preset::std_normal), n, rng)) s << format_number(v) << '\n';
  return write_file("normal_" + std::to_string(n) + "_" + std::to_string(seed) + ".txt", s.str());
}

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bagcv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

}  // namespace

TEST_CASE("ingest") {
  SUBCASE("jitter breaks ties inside the uniform support") {
    const auto in = cli::ingest(write_file("ones.txt", "1\n1\n1\n"), "", 0.5, 3);
    CHECK(in.ties_before_jitter == 2);
    REQUIRE(in.sample.size() == 3);
    CHECK(in.sample.tie_count() == 0);
    for (double v : in.sample.values()) {
      CHECK(v > 0.5);
      CHECK(v < 1.5);
    }
    CHECK(cli::ingest(write_file("ones.txt", "1\n1\n1\n"), "", 0.5, 3).sample.values()[1] ==
          in.sample.values()[1]);
  }
  SUBCASE("header row and named column") {
    const auto p = write_file("flights.csv", "carrier,delay,dist\nAA,5,100\nUA,-3.5,200\nDL,12,300\n");
    const auto in = cli::ingest(p, "delay", 0.0, std::nullopt);
    REQUIRE(in.sample.size() == 3);
    CHECK(in.sample.min() == -3.5);
    CHECK(in.sample.max() == 12.0);
    CHECK(cli::ingest(p, "2", 0.0, std::nullopt).sample.max() == 300.0);
  }
  SUBCASE("bad rows are reported by line") {
    const auto p = write_file("bad.txt", "1\nx\n2\n\ninf\n3\nfoo\nbar\nbaz\nqux\n");
    try {
      cli::ingest(p, "", 0.0, std::nullopt);
      FAIL("expected a data error");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("2") != std::string::npos);
      CHECK(msg.find("5") != std::string::npos);
    }
  }
  SUBCASE("too few values") {
    CHECK_THROWS_AS(cli::ingest(write_file("one.txt", "4.2\n"), "", 0.0, std::nullopt), DataError);
  }
}

TEST_CASE("select with m = n and one exact resample is the full-sample selector") {
  const fs::path p = normal_file(500, 1);
  const Run r = run_cli({"select", "--input", p.string(), "--m", "500", "--N", "1", "--exact",
                         "--seed", "9", "--no-timing"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double expected = cv_minimize(cli::ingest(p, "", 0.0, std::nullopt).sample).h_opt;
  CHECK(j.at("bandwidth").get<double>() == expected);
  CHECK(j.at("m") == 500);
  CHECK(j.at("N") == 1);
  CHECK(j.contains("version"));
  CHECK_FALSE(j.contains("elapsed_seconds"));
}

TEST_CASE("select estimates m0 when m is omitted") {
  const fs::path p = normal_file(3000, 2);
  const Run r = run_cli({"select", "--input", p.string(), "--N", "20", "--s", "4", "--seed", "5"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.contains("m0"));
  CHECK(j.at("m0").at("m_hat") == j.at("m"));
  CHECK(j.at("m0").at("curve").size() == 50);
  CHECK(j.contains("elapsed_seconds"));
  CHECK(j.at("bandwidth").get<double>() > 0.0);
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
  const fs::path p = normal_file(2000, 3);
  const std::vector<std::string> base{"select", "--input", p.string(), "--m", "300",
                                      "--N", "25", "--seed", "11", "--no-timing"};
  const Run a = run_cli(base);
  auto threaded = base;
  threaded.insert(threaded.end(), {"--threads", "4"});
  const Run b = run_cli(threaded);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);

  const std::vector<std::string> m0{"m0", "--input", p.string(), "--s", "6", "--seed", "4", "--no-timing"};
  CHECK(run_cli(m0).out == run_cli(m0).out);
}

TEST_CASE("density output integrates to one") {
  const fs::path p = normal_file(1000, 4);
  const Run r = run_cli({"density", "--input", p.string(), "--m", "200", "--N", "10", "--seed", "1"});
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,density");
  std::vector<double> xs;
  std::vector<double> fs_;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    xs.push_back(std::stod(line.substr(0, comma)));
    fs_.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(xs.size() == 512);
  double area = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) area += 0.5 * (fs_[k] + fs_[k - 1]) * (xs[k] - xs[k - 1]);
  CHECK(std::abs(area - 1.0) < 0.01);

  const Run fixed = run_cli({"density", "--input", p.string(), "--bandwidth", "0.3"});
  CHECK(fixed.status == 0);
}

TEST_CASE("exit codes") {
  const fs::path good = normal_file(500, 5);
  CHECK(run_cli({}).status == cli::usage);
  CHECK(run_cli({"select", "--input", good.string(), "--m", "100"}).status == cli::usage);
  CHECK(run_cli({"select", "--input", good.string(), "--m", "9999", "--seed", "1"}).status == cli::usage);
  CHECK(run_cli({"select", "--input", (tmp_dir() / "missing.txt").string(), "--seed", "1"}).status ==
        cli::data);
  CHECK(run_cli({"select", "--input", write_file("junk.txt", "a\nb\nc\n").string(), "--seed", "1"})
            .status == cli::data);
  // Coarse subsample bins push most searches to the lower bound.
  const Run coarse = run_cli({"select", "--input", good.string(), "--m", "40", "--nb", "4", "--N", "20",
                              "--seed", "1", "--no-timing"});
  CHECK(coarse.status == cli::numerical);
  CHECK(coarse.err.find("unreliable") != std::string::npos);
}

TEST_CASE("table of bias constants from the command line") {
  const Run r = run_cli({"sim", "--study", "table1"});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("density,mu_rescale,mu_cv,m_crit\n", 0) == 0);
}

TEST_CASE("sampling study from a JSON spec") {
  const auto cfg = write_file("spec.json",
                              R"({"density": "D1", "n": 1000, "reps": 2, "N": 5, "m_list": [100]})");
  CHECK(run_cli({"sim", "--study", "sampling", "--config", cfg.string()}).status == cli::usage);
  const Run r = run_cli({"sim", "--study", "sampling", "--config", cfg.string(), "--seed", "3"});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("rep,method,m,value\n", 0) == 0);
}
