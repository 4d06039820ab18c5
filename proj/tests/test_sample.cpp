#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "bagcv/error.hpp"
#include "bagcv/parallel.hpp"
#include "bagcv/quadrature.hpp"
#include "bagcv/rng.hpp"
#include "bagcv/sample.hpp"

using namespace bagcv;

TEST_CASE("sample sorts and validates") {
  const Sample s({3.0, -1.0, 2.0, 2.0});
  CHECK(s.size() == 4);
  CHECK(s[0] == -1.0);
  CHECK(s[3] == 3.0);
  CHECK(s.tie_count() == 1);
  CHECK(s.mean() == doctest::Approx(1.5));
  CHECK_THROWS_AS(Sample({1.0}), DataError);
  CHECK_THROWS_AS(Sample({1.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
  CHECK_THROWS_AS(Sample({1.0, std::numeric_limits<double>::infinity()}), DataError);
}

TEST_CASE("quantiles follow linear interpolation") {
  const Sample s({1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(s.quantile(0.0) == 1.0);
  CHECK(s.quantile(1.0) == 5.0);
  CHECK(s.quantile(0.5) == 3.0);
  CHECK(s.quantile(0.25) == 2.0);
  CHECK(s.quantile(0.1) == doctest::Approx(1.4));
  CHECK(s.iqr() == 2.0);
  // sd with the n-1 divisor
  CHECK(s.sd() == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("affine map keeps order and rejects nonpositive scale") {
  const Sample s({0.0, 1.0, 4.0});
  const Sample t = s.affine(10.0, 2.0);
  CHECK(t[0] == 10.0);
  CHECK(t[2] == 18.0);
  CHECK_THROWS_AS(s.affine(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(s.affine(0.0, -1.0), DomainError);
}

TEST_CASE("derived streams depend only on (seed, stream)") {
  Rng a = derived_stream(7, 3);
  Rng b = derived_stream(7, 3);
  Rng c = derived_stream(7, 4);
  Rng d = derived_stream(8, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failure") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);

  try {
    parallel_for(100, 3, [](std::size_t i) {
      if (i == 17 || i == 60) throw DataError("fail " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "fail 17");
  }
}

TEST_CASE("quadrature integrates smooth functions on finite and infinite ranges") {
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity());
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0).value == doctest::Approx(9.0).epsilon(1e-13));
}
