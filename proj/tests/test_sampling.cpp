#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "hypsel/sampling.hpp"
#include "hypsel/rng.hpp"
#include "test_util.hpp"

using namespace hypsel;
using hypsel_test::random_class;
using hypsel_test::random_simplex_point;

TEST_CASE("draw from a point mass") {
  SampleOracle o = SampleOracle::make_sampled(Distribution({1.0, 0.0}), 7);
  std::vector<std::size_t> xs = o.draw(5);
  REQUIRE(xs.size() == 5);
  for (std::size_t x : xs) CHECK(x == 0);
  CHECK(o.samples_drawn() == 5);
}

TEST_CASE("empty draw leaves the counter alone") {
  SampleOracle o = SampleOracle::make_sampled(Distribution({0.5, 0.5}), 7);
  CHECK(o.draw(0).empty());
  CHECK(o.samples_drawn() == 0);
}

TEST_CASE("draws concentrate at the right frequency") {
  SampleOracle o = SampleOracle::make_sampled(Distribution({0.5, 0.5}), 42);
  std::vector<std::size_t> xs = o.draw(100000);
  double freq = 0.0;
  for (std::size_t x : xs) freq += x == 0 ? 1.0 : 0.0;
  freq /= 100000.0;
  CHECK(std::fabs(freq - 0.5) < 0.01);
}

TEST_CASE("exact mode refuses draws and counts queries separately") {
  SampleOracle o = SampleOracle::make_exact(Distribution({0.7, 0.3}));
  CHECK_THROWS_AS(o.draw(3), std::runtime_error);
  std::vector<double> est = o.estimate_expectations({{1.0, 0.0}}, 100);
  CHECK(est[0] == doctest::Approx(0.7));
  CHECK(o.samples_drawn() == 0);
  CHECK(o.exact_queries() == 1);
}

TEST_CASE("constant functions estimate to one") {
  SampleOracle s = SampleOracle::make_sampled(Distribution({0.3, 0.7}), 5);
  CHECK(s.estimate_expectations({{1.0, 1.0}}, 17)[0] == doctest::Approx(1.0));
  SampleOracle e = SampleOracle::make_exact(Distribution({0.3, 0.7}));
  CHECK(e.estimate_expectations({{1.0, 1.0}}, 17)[0] == doctest::Approx(1.0));
}

TEST_CASE("chernoff concentration across seeds") {
  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SampleOracle o = SampleOracle::make_sampled(Distribution({0.5, 0.5}), seed);
    double est = o.estimate_expectations({{1.0, 0.0}}, 400)[0];
    if (std::fabs(est - 0.5) <= 0.1) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("budget accounting is exact") {
  SampleOracle o = SampleOracle::make_sampled(Distribution({0.2, 0.8}), 11);
  o.draw(7);
  o.draw(0);
  o.estimate_expectations({{0.0, 1.0}}, 13);
  CHECK(o.samples_drawn() == 20);
}

TEST_CASE("identical seeds give identical streams") {
  SampleOracle a = SampleOracle::make_sampled(Distribution({0.2, 0.3, 0.5}), 99);
  SampleOracle b = SampleOracle::make_sampled(Distribution({0.2, 0.3, 0.5}), 99);
  CHECK(a.draw(1000) == b.draw(1000));
  CHECK(a.estimate_expectations({{0.1, 0.5, 0.9}}, 500) ==
        b.estimate_expectations({{0.1, 0.5, 0.9}}, 500));
}

TEST_CASE("progress step on the worked two-point example") {
  HypothesisClass Q({Distribution({1.0, 0.0}), Distribution({0.0, 1.0})});
  SampleOracle o = SampleOracle::make_exact(Distribution({0.5, 0.5}));
  const double alpha = 0.1;
  ProgressOutput po = progress_step(DistanceVector::zeros(2),
                                    TestDirection({0.5, 0.5}), alpha, 0.1, o,
                                    Q);
  CHECK(po.z[0] == doctest::Approx(0.5 - alpha / 2.0));
  CHECK(po.z[1] == doctest::Approx(0.5 - alpha / 2.0));
  CHECK(po.used_samples == 0);
}

TEST_CASE("progress step contract in exact mode") {
  SplitMix64 rng(12321);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng.next_below(6);
    const std::size_t d = 2 + rng.next_below(10);
    HypothesisClass Q = random_class(rng, n, d);
    Distribution p(random_simplex_point(rng, d));
    SampleOracle o = SampleOracle::make_exact(p);
    TestDirection h(random_simplex_point(rng, n));
    const double alpha = 0.02 + 0.3 * rng.next_double();
    ProgressOutput po =
        progress_step(DistanceVector::zeros(n), h, alpha, 0.1, o, Q);

    DistanceVector vp = distance_vector(p, Q);
    double hz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(po.z[i] <= vp[i] + 1e-12);
      hz += h[i] * po.z[i];
    }
    GameValueResult sm = support_min(h, Q, 1.0);
    CHECK(hz >= sm.value - alpha - 1e-12);
  }
}

TEST_CASE("progress step concentration across seeds") {
  SplitMix64 rng(777);
  HypothesisClass Q = random_class(rng, 3, 6);
  Distribution p(random_simplex_point(rng, 6));
  DistanceVector vp = distance_vector(p, Q);
  TestDirection h({0.2, 0.5, 0.3});
  GameValueResult sm = support_min(h, Q, 1.0);
  const double alpha = 0.2, beta = 0.1;
  std::size_t good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SampleOracle o = SampleOracle::make_sampled(p, seed);
    ProgressOutput po =
        progress_step(DistanceVector::zeros(3), h, alpha, beta, o, Q);
    bool ok = true;
    for (std::size_t i = 0; i < 3; ++i) {
      if (po.z[i] > vp[i]) ok = false;
    }
    double hz = 0.0;
    for (std::size_t i = 0; i < 3; ++i) hz += h[i] * po.z[i];
    if (hz < sm.value - alpha) ok = false;
    if (ok) ++good;
    CHECK(po.used_samples ==
          progress_sample_size(3, alpha, beta));
    CHECK(o.samples_drawn() == po.used_samples);
  }
  CHECK(good >= 80);
}

TEST_CASE("parameter validation") {
  HypothesisClass Q({Distribution({1.0, 0.0})});
  SampleOracle o = SampleOracle::make_exact(Distribution({0.5, 0.5}));
  CHECK_THROWS_AS(progress_step(DistanceVector::zeros(1),
                                TestDirection({1.0}), 1.5, 0.1, o, Q),
                  std::invalid_argument);
  CHECK_THROWS_AS(progress_step(DistanceVector::zeros(1),
                                TestDirection({1.0}), 0.1, 0.0, o, Q),
                  std::invalid_argument);
}
