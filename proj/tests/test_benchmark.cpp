#include <doctest.h>

#include "dlrec/benchmark.hpp"
#include "dlrec/errors.hpp"
#include "oracles.hpp"

using namespace dlrec;

TEST_CASE("benchmark functions") {
  const auto b = make_benchmark("branin");
  Eigen::VectorXd x(2);
  x << oracle::kPi, 2.275;
  CHECK(b.evaluate(x) == doctest::Approx(-0.39788735772973816).epsilon(1e-9));
  x << 1.3, 7.7;
  CHECK(branin(1.3, 7.7) == doctest::Approx(oracle::branin(1.3, 7.7)).epsilon(1e-14));
  // Grid oracle: the stated optimum is not beaten by any grid point.
  CHECK(-oracle::branin_grid_min() <= b.optimum + 1e-12);
  CHECK(-oracle::branin_grid_min() >= b.optimum - 1e-3);

  const auto s = make_benchmark("sphere");
  Eigen::VectorXd u(1);
  u << 0.3;
  CHECK(s.evaluate(u) == 0.0);
  const auto r = make_benchmark("rastrigin");
  CHECK(r.evaluate(Eigen::VectorXd::Zero(2)) == 0.0);
  CHECK_THROWS_AS(make_benchmark("ackley"), ValidationError);
}

TEST_CASE("quantile") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(quantile({4, 1, 3, 2}, 0.5) == oracle::median({4, 1, 3, 2}));
}

TEST_CASE("paired runs across modes") {
  const auto fn = make_benchmark("sphere");
  std::vector<BenchmarkVariant> variants(4);
  const char* names[] = {"ei", "pi", "ucb", "gammaei"};
  for (int i = 0; i < 4; ++i) {
    variants[static_cast<std::size_t>(i)].label = names[i];
    variants[static_cast<std::size_t>(i)].params.mode = parse_acquisition_mode(names[i]);
    if (i < 3) variants[static_cast<std::size_t>(i)].params.omega_policy = OmegaPolicy::Disabled;
  }
  const auto summary = run_benchmark(fn, variants, 3, 5, 20, 10);
  REQUIRE(summary.variants.size() == 4);
  for (const auto& v : summary.variants) {
    REQUIRE(v.runs.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(v.runs[r].best_so_far.size() == 25);
      CHECK(v.runs[r].seed == 10 + r);
      for (std::size_t i = 0; i < 5; ++i) CHECK(v.runs[r].history[i].x == summary.variants[0].runs[r].history[i].x);
    }
    CHECK(v.q1_gap <= v.median_gap);
    CHECK(v.median_gap <= v.q3_gap);
  }
  const auto doc = benchmark_to_json(summary);
  CHECK(doc["variants"].size() == 4);
  CHECK(doc["variants"][0]["runs"][0]["best_so_far"].size() == 25);
  CHECK(doc["variants"][0]["runs"][0]["random_search_steps"] == 0);
}

TEST_CASE("sphere median gap is small for every mode") {
  const auto fn = make_benchmark("sphere");
  for (const char* name : {"gammaei", "ei", "pi", "ucb"}) {
    BenchmarkVariant v{name, {}};
    v.params.mode = parse_acquisition_mode(name);
    const auto s = run_benchmark(fn, {v}, 5, 5, 60, 0);
    CHECK_MESSAGE(s.variants[0].median_gap <= 1e-2, name);
  }
}
