#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "hypsel/rng.hpp"
#include "hypsel/tv_geometry.hpp"
#include "test_util.hpp"

using namespace hypsel;
using hypsel_test::random_class;
using hypsel_test::random_simplex_point;
using hypsel_test::support_min_grid_oracle;

namespace {

const HypothesisClass kCorners({Distribution({1.0, 0.0}),
                                Distribution({0.0, 1.0})});

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

TEST_CASE("support_min on the two-point-mass class") {
  GameValueResult r = support_min(TestDirection({0.5, 0.5}), kCorners, 1e-6);
  CHECK(r.value == doctest::Approx(0.5));  // half the distance between them
  CHECK(r.gap == doctest::Approx(0.0).epsilon(1e-9));

  GameValueResult point = support_min(TestDirection({1.0, 0.0}), kCorners, 1e-6);
  CHECK(point.value == doctest::Approx(0.0));
  CHECK(tv_distance(point.witness, kCorners[0]) == doctest::Approx(0.0));
}

TEST_CASE("support_min against the grid-allocation oracle") {
  HypothesisClass Q({Distribution({0.9, 0.1}), Distribution({0.1, 0.9})});
  const std::vector<double> h{0.5, 0.5};
  const double grid = support_min_grid_oracle(h, Q, 10000);
  CHECK(grid == doctest::Approx(0.4).epsilon(1e-3));  // frozen from the oracle
  GameValueResult r = support_min(TestDirection(h), Q, 1e-6);
  CHECK(r.value == doctest::Approx(0.4));
}

TEST_CASE("support_min certificate on random instances") {
  SplitMix64 rng(2718);
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 1 + rng.next_below(6);
    const std::size_t d = 2 + rng.next_below(10);
    HypothesisClass Q = random_class(rng, n, d);
    TestDirection h(random_simplex_point(rng, n));
    GameValueResult r = support_min(h, Q, 1e-6);

    // Value is attained by the witness.
    double attained = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      attained += h[i] * tv_distance(r.witness, Q[i]);
    }
    CHECK(attained == doctest::Approx(r.value).epsilon(1e-10));
    CHECK(std::fabs(r.gap) <= 1e-9);

    // Discriminator range and sign pattern.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t x = 0; x < d; ++x) {
        CHECK(r.discriminators[i][x] >= 0.0);
        CHECK(r.discriminators[i][x] <= 1.0);
        if (r.witness[x] > Q[i][x]) CHECK(r.discriminators[i][x] == 1.0);
        if (r.witness[x] < Q[i][x]) CHECK(r.discriminators[i][x] == 0.0);
      }
    }

    // The certificate property: for random p', the weighted discriminator
    // advantage stays above the value.
    for (int s = 0; s < 5; ++s) {
      std::vector<double> p = random_simplex_point(rng, d);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double adv = 0.0;
        for (std::size_t x = 0; x < d; ++x) {
          adv += r.discriminators[i][x] * (p[x] - Q[i][x]);
        }
        acc += h[i] * adv;
      }
      CHECK(acc >= r.value - 2e-9);
    }

    // Against the independent oracle at its own resolution.
    const double grid = support_min_grid_oracle(h.weights(), Q, 1000);
    CHECK(r.value <= grid + 1e-12);
    CHECK(r.value >= grid - 5e-3);
  }
}

TEST_CASE("margin") {
  MarginQuery zero(DistanceVector::zeros(2), 0.0);
  CHECK(margin(TestDirection({0.5, 0.5}), zero, kCorners) ==
        doctest::Approx(0.5));

  // At the profile of a class member every direction is satisfied.
  SplitMix64 rng(11);
  DistanceVector vq1 = distance_vector(kCorners[0], kCorners);
  MarginQuery q1(vq1, 0.0);
  for (int t = 0; t < 20; ++t) {
    TestDirection h(random_simplex_point(rng, 2));
    CHECK(margin(h, q1, kCorners) <= 1e-12);
  }

  MarginQuery half(DistanceVector({0.5, 0.5}), 0.0);
  CHECK(margin(TestDirection({0.5, 0.5}), half, kCorners) ==
        doctest::Approx(0.0));
}

TEST_CASE("violated_test_value on the corner class") {
  SupportCache cache;
  ViolatedTestResult r = violated_test_value(
      MarginQuery(DistanceVector::zeros(2), 0.0), kCorners, 1e-9, &cache);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.maximizer[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.gap <= 1e-8);

  ViolatedTestResult ones = violated_test_value(
      MarginQuery(DistanceVector({1.0, 1.0}), 0.0), kCorners, 1e-9, &cache);
  CHECK(ones.value <= 1e-9);
}

TEST_CASE("violated_test_value is nonpositive at reachable profiles") {
  SplitMix64 rng(555);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + rng.next_below(5);
    const std::size_t d = 2 + rng.next_below(8);
    HypothesisClass Q = random_class(rng, n, d);
    Distribution p(random_simplex_point(rng, d));
    SupportCache cache;
    ViolatedTestResult r = violated_test_value(
        MarginQuery(distance_vector(p, Q), 0.0), Q, 1e-9, &cache);
    CHECK(r.value <= 1e-9);
  }
}

TEST_CASE("violated_test_value matches a grid maximization") {
  // n = 2 lets the direction simplex be scanned exhaustively.
  SplitMix64 rng(8080);
  for (int t = 0; t < 10; ++t) {
    HypothesisClass Q = random_class(rng, 2, 2 + rng.next_below(4));
    std::vector<double> uv{0.4 * rng.next_double(), 0.4 * rng.next_double()};
    SupportCache cache;
    ViolatedTestResult r = violated_test_value(
        MarginQuery(DistanceVector(uv), 0.0), Q, 1e-9, &cache);
    double best = -1e9;
    for (int k = 0; k <= 1000; ++k) {
      const double w = k / 1000.0;
      const std::vector<double> h{w, 1.0 - w};
      const double g =
          support_min_grid_oracle(h, Q, 2000) - (h[0] * uv[0] + h[1] * uv[1]);
      best = std::max(best, g);
    }
    CHECK(std::fabs(r.value - best) <= 5e-3);
  }
}

TEST_CASE("G is 1-Lipschitz in l1 and concave") {
  SplitMix64 rng(90);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng.next_below(4);
    const std::size_t d = 2 + rng.next_below(6);
    HypothesisClass Q = random_class(rng, n, d);
    std::vector<double> uv(n);
    for (double& v : uv) v = 0.5 * rng.next_double();
    MarginQuery query(DistanceVector(uv), 0.0);
    TestDirection h1(random_simplex_point(rng, n));
    TestDirection h2(random_simplex_point(rng, n));
    const double g1 = margin(h1, query, Q);
    const double g2 = margin(h2, query, Q);
    CHECK(std::fabs(g1 - g2) <=
          l1_distance(h1.weights(), h2.weights()) + 1e-9);

    std::vector<double> mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (h1[i] + h2[i]);
    CHECK(margin(TestDirection(mid), query, Q) >= 0.5 * (g1 + g2) - 1e-9);
  }
}

TEST_CASE("separation: small margin at h empties a surrounding ball") {
  SplitMix64 rng(4242);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng.next_below(3);
    const std::size_t d = 2 + rng.next_below(5);
    HypothesisClass Q = random_class(rng, n, d);
    std::vector<double> uv(n);
    for (double& v : uv) v = 0.4 * rng.next_double();
    MarginQuery query(DistanceVector(uv), 0.0);
    const double eps = 0.1 + 0.2 * rng.next_double();
    TestDirection h(random_simplex_point(rng, n));
    if (margin(h, query, Q) > eps / 2.0) continue;
    for (int s = 0; s < 20; ++s) {
      // Random direction within the l1 ball of radius eps/4, kept on simplex.
      std::vector<double> pert = random_simplex_point(rng, n);
      std::vector<double> h2(n);
      double shift = eps / 8.0;
      for (std::size_t i = 0; i < n; ++i) {
        h2[i] = std::max(0.0, h[i] + shift * (pert[i] - h[i]));
      }
      double sum = 0.0;
      for (double v : h2) sum += v;
      for (double& v : h2) v /= sum;
      if (l1_distance(h.weights(), h2) > eps / 4.0) continue;
      CHECK(margin(TestDirection(h2), query, Q) <= eps + 1e-9);
    }
  }
}

TEST_CASE("violated tests are upward closed in u") {
  SplitMix64 rng(31415);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 2 + rng.next_below(4);
    const std::size_t d = 2 + rng.next_below(6);
    HypothesisClass Q = random_class(rng, n, d);
    std::vector<double> uv(n), uv2(n);
    for (std::size_t i = 0; i < n; ++i) {
      uv[i] = 0.4 * rng.next_double();
      uv2[i] = uv[i] + 0.3 * rng.next_double();
    }
    const double eps = 0.1;
    SupportCache cache;
    ViolatedTestResult r1 = violated_test_value(
        MarginQuery(DistanceVector(uv), eps), Q, 1e-9, &cache);
    if (r1.value > eps) continue;
    ViolatedTestResult r2 = violated_test_value(
        MarginQuery(DistanceVector(uv2), eps), Q, 1e-9, &cache);
    CHECK(r2.value <= eps + 1e-9);
  }
}

TEST_CASE("yatracos_set") {
  std::vector<int> f = yatracos_set(0, 1, kCorners);
  CHECK(f == std::vector<int>{1, 0});
  CHECK_THROWS_AS(yatracos_set(1, 1, kCorners), std::invalid_argument);
  CHECK_THROWS_AS(yatracos_set(0, 5, kCorners), std::invalid_argument);

  HypothesisClass Q({Distribution({0.9, 0.1}), Distribution({0.1, 0.9})});
  std::vector<int> g = yatracos_set(0, 1, Q);
  CHECK(g == std::vector<int>{1, 0});
  const double sep = (Q[0][0] - Q[1][0]) * g[0] + (Q[0][1] - Q[1][1]) * g[1];
  CHECK(sep == doctest::Approx(tv_distance(Q[0], Q[1])));  // = 0.8
  CHECK(sep == doctest::Approx(0.8));
}

TEST_CASE("feasibility_round") {
  SplitMix64 rng(161803);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 1 + rng.next_below(5);
    const std::size_t d = 2 + rng.next_below(8);
    HypothesisClass Q = random_class(rng, n, d);
    Distribution p(random_simplex_point(rng, d));
    const double eps = 0.05 + 0.1 * rng.next_double();
    DistanceVector u = distance_vector(p, Q);
    Distribution r = feasibility_round(u, eps, Q, 1e-6);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(tv_distance(r, Q[i]) <= u[i] + eps + 2e-6);
    }
  }

  // The all-ones point is feasible for any class at margin zero.
  Distribution r1 =
      feasibility_round(DistanceVector({1.0, 1.0}), 0.0, kCorners, 1e-6);
  CHECK(r1.size() == 2);

  Distribution r2 =
      feasibility_round(DistanceVector({0.5, 0.5}), 0.01, kCorners, 1e-6);
  CHECK(tv_distance(r2, kCorners[0]) <= 0.52);
  CHECK(tv_distance(r2, kCorners[1]) <= 0.52);

  // Infeasible inputs are rejected with a certificate.
  CHECK_THROWS_AS(
      feasibility_round(DistanceVector({0.0, 0.0}), 0.1, kCorners, 1e-6),
      std::runtime_error);
}

TEST_CASE("support cache reuse stays consistent") {
  SplitMix64 rng(2024);
  HypothesisClass Q = random_class(rng, 4, 6);
  SupportCache cache;
  std::vector<double> uv(4, 0.0);
  for (int step = 0; step < 10; ++step) {
    ViolatedTestResult warm = violated_test_value(
        MarginQuery(DistanceVector(uv), 0.0), Q, 1e-9, &cache);
    SupportCache fresh;
    ViolatedTestResult cold = violated_test_value(
        MarginQuery(DistanceVector(uv), 0.0), Q, 1e-9, &fresh);
    CHECK(warm.value == doctest::Approx(cold.value).epsilon(1e-8));
    for (double& v : uv) v = std::min(1.0, v + 0.08 * rng.next_double());
  }
}
