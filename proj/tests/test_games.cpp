#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "hypsel/entropy_player.hpp"
#include "hypsel/games.hpp"
#include "hypsel/rng.hpp"
#include "test_util.hpp"

using namespace hypsel;
using hypsel_test::random_class;
using hypsel_test::random_simplex_point;

namespace {

const HypothesisClass kCorners({Distribution({1.0, 0.0}),
                                Distribution({0.0, 1.0})});

}  // namespace

TEST_CASE("primal game with the exact-oracle adversary terminates feasible") {
  SampleOracle oracle = SampleOracle::make_exact(Distribution({0.5, 0.5}));
  SupportCache cache;
  const double eps = 0.2;
  PrimalTranscript t = run_primal_game(
      kCorners, eps, max_entropy_primal_player(kCorners, eps, &cache),
      progress_adversary(kCorners, oracle, eps / 2.0, 0.1, &cache), 10000,
      &cache);
  CHECK(t.terminated);
  REQUIRE(!t.points.empty());
  const DistanceVector& u = t.points.back();

  // Brute-check: some grid distribution dominates u + eps (plus slack).
  bool feasible = false;
  for (int k = 0; k <= 1000 && !feasible; ++k) {
    const double s = k / 1000.0;
    Distribution p({s, 1.0 - s});
    bool ok = true;
    for (std::size_t i = 0; i < 2; ++i) {
      if (tv_distance(p, kCorners[i]) > u[i] + eps + eps / 8.0 + 1e-9)
        ok = false;
    }
    feasible = ok;
  }
  CHECK(feasible);
}

TEST_CASE("primal game ends immediately at a huge margin") {
  SampleOracle oracle = SampleOracle::make_exact(Distribution({0.5, 0.5}));
  PrimalTranscript t = run_primal_game(
      kCorners, 1.0, max_entropy_primal_player(kCorners, 1.0),
      progress_adversary(kCorners, oracle, 0.5, 0.1), 100);
  CHECK(t.rounds == 0);
  CHECK(t.terminated);
}

TEST_CASE("decreasing adversary move is rejected") {
  SampleOracle oracle = SampleOracle::make_exact(Distribution({0.7, 0.3}));
  auto bad_adversary = [](std::size_t, const DistanceVector& u,
                          const TestDirection&) {
    std::vector<double> v = u.values;
    v[0] = std::max(0.0, v[0] - 0.1);
    v[1] = std::max(0.0, v[1] + 0.3);
    return DistanceVector(v);
  };
  // First move from zero would not decrease; grow u once legally, then the
  // second move decreases coordinate 0 and must be flagged.
  const double eps = 0.1;
  CHECK_THROWS_WITH_AS(
      run_primal_game(kCorners, eps,
                      max_entropy_primal_player(kCorners, eps), bad_adversary,
                      100),
      doctest::Contains("illegal adversary"), std::runtime_error);
}

TEST_CASE("validate_primal_move") {
  // At u = profile of the midpoint, the balanced test has zero margin, so
  // staying put is legal at any eps.
  DistanceVector u({0.5, 0.5});
  TestDirection h({0.5, 0.5});
  CHECK(validate_primal_move(u, h, u, 0.2, kCorners));

  DistanceVector down({0.4, 0.5});
  CHECK_FALSE(validate_primal_move(u, h, down, 0.2, kCorners));

  // A fresh transcript replays cleanly.
  SampleOracle oracle = SampleOracle::make_exact(Distribution({0.6, 0.4}));
  SupportCache cache;
  const double eps = 0.25;
  PrimalTranscript t = run_primal_game(
      kCorners, eps, max_entropy_primal_player(kCorners, eps, &cache),
      progress_adversary(kCorners, oracle, eps / 2.0, 0.1, &cache), 1000,
      &cache);
  for (std::size_t k = 0; k < t.tests.size(); ++k) {
    CHECK(validate_primal_move(t.points[k], t.tests[k], t.points[k + 1], eps,
                               kCorners));
  }
}

TEST_CASE("primal transcripts shrink the violated sets") {
  SampleOracle oracle = SampleOracle::make_exact(Distribution({0.3, 0.7}));
  SupportCache cache;
  const double eps = 0.15;
  HypothesisClass Q({Distribution({0.9, 0.1}), Distribution({0.2, 0.8}),
                     Distribution({0.5, 0.5})});
  PrimalTranscript t = run_primal_game(
      Q, eps, max_entropy_primal_player(Q, eps, &cache),
      progress_adversary(Q, oracle, eps / 2.0, 0.1, &cache), 1000, &cache);
  SplitMix64 rng(77);
  for (std::size_t k = 0; k + 1 < t.points.size(); ++k) {
    MarginQuery before(t.points[k], eps);
    MarginQuery after(t.points[k + 1], eps);
    for (int s = 0; s < 25; ++s) {
      TestDirection h(random_simplex_point(rng, Q.size()));
      if (margin(h, after, Q) > eps) {
        CHECK(margin(h, before, Q) > eps - 1e-12);
      }
    }
  }
}

TEST_CASE("dual game empties instantly at huge radius") {
  DualTranscript t = run_dual_game(2, 1.5, max_entropy_dual_player(),
                                   greedy_diameter_adversary(), 100);
  CHECK(t.rounds <= 1);
}

TEST_CASE("max-entropy player beats the round bound") {
  DualTranscript t = run_dual_game(4, 0.5, max_entropy_dual_player(),
                                   greedy_diameter_adversary(), 1000);
  CHECK(t.rounds <= dual_round_bound(4, 0.5));  // bound value 45
  CHECK(dual_round_bound(4, 0.5) == 45);
}

TEST_CASE("cut through the pick is rejected") {
  auto through_pick = [](const DualAdversaryContext& ctx)
      -> std::optional<DualCut> {
    // Offset at the pick itself: the ball is clearly not excluded.
    std::vector<double> g(ctx.universe.n, 0.0);
    g[0] = 1.0;
    double at = ctx.pick[0];
    return DualCut{g, at};
  };
  CHECK_THROWS_WITH_AS(
      run_dual_game(3, 0.2, max_entropy_dual_player(), through_pick, 10),
      doctest::Contains("illegal adversary cut"), std::runtime_error);
}

TEST_CASE("player picks outside the universe are rejected") {
  auto stubborn = [](const DualPlayerContext& ctx) {
    std::vector<double> h(ctx.universe.n, 0.0);
    h[0] = 1.0;  // refuses to move even after e_0 is cut away
    return h;
  };
  auto cut_e0 = [](const DualAdversaryContext& ctx)
      -> std::optional<DualCut> {
    std::vector<double> g(ctx.universe.n, 0.0);
    g[0] = 1.0;
    return DualCut{g, ctx.pick[0] - ctx.universe.eps};
  };
  CHECK_THROWS_WITH_AS(run_dual_game(3, 0.3, stubborn, cut_e0, 10),
                       doctest::Contains("illegal player"),
                       std::runtime_error);
}

TEST_CASE("arbitrary player scans vertices first") {
  DualUniverse full{3, 0.25, {}};
  std::vector<double> interior{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::vector<double> pick =
      arbitrary_test_player(DualPlayerContext{full, 0, interior, 1.0});
  CHECK(pick == std::vector<double>{1.0, 0.0, 0.0});

  // Cut the first vertex away; the scan falls through to the second.
  DualUniverse cut = full;
  cut.cuts.push_back(DualCut{{1.0, 0.0, 0.0}, 0.5});
  pick = arbitrary_test_player(DualPlayerContext{cut, 1, interior, 0.2});
  CHECK(pick == std::vector<double>{0.0, 1.0, 0.0});

  CHECK_THROWS_AS(
      arbitrary_test_player(DualPlayerContext{cut, 2, interior, -1.0}),
      std::runtime_error);
}

TEST_CASE("universes are monotone and picks spread out") {
  DualTranscript t = run_dual_game(6, 0.4, max_entropy_dual_player(),
                                   random_direction_adversary(9), 1000);
  // Every pick satisfies all earlier cuts (monotone intersection).
  for (std::size_t k = 0; k < t.picks.size(); ++k) {
    for (std::size_t c = 0; c < k; ++c) {
      REQUIRE(t.cuts[c].has_value());
      double acc = 0.0;
      for (std::size_t i = 0; i < 6; ++i) {
        acc += t.cuts[c]->normal[i] * t.picks[k][i];
      }
      CHECK(acc <= t.cuts[c]->offset + 1e-9);
    }
  }
  // Consecutive max-entropy picks are at least eps apart in l1.
  for (std::size_t k = 0; k + 1 < t.picks.size(); ++k) {
    CHECK(l1_distance(t.picks[k], t.picks[k + 1]) >= t.eps - 1e-9);
  }
}

TEST_CASE("primal-induced adversary plays a legal dual game") {
  SplitMix64 rng(404);
  HypothesisClass Q = random_class(rng, 4, 8);
  Distribution target(random_simplex_point(rng, 8));
  DualTranscript t =
      run_dual_game(4, 0.1, max_entropy_dual_player(),
                    primal_induced_adversary(Q, target, 0.4), 1000);
  CHECK(t.rounds >= 1);
  CHECK(t.rounds <= dual_round_bound(4, 0.1));
}

TEST_CASE("dual_round_bound values") {
  CHECK(dual_round_bound(4, 0.5) == 45);
  CHECK(dual_round_bound(2, 1.0) == 6);
  // Any eps >= 2 ends in at most one round: the whole simplex fits in the
  // ball around any pick.
  CHECK(dual_round_bound(16, 2.0) == 6);
  DualTranscript t = run_dual_game(16, 2.0, max_entropy_dual_player(),
                                   greedy_diameter_adversary(), 100);
  CHECK(t.rounds <= 1);
}

TEST_CASE("transcript serialization round-trips") {
  DualTranscript t = run_dual_game(4, 0.5, max_entropy_dual_player(),
                                   random_direction_adversary(3), 1000);
  const std::string text = serialize_transcript(t);
  DualTranscript back = parse_dual_transcript(text);
  CHECK(serialize_transcript(back) == text);
  CHECK(back.rounds == t.rounds);
  CHECK(back.picks.size() == t.picks.size());

  SampleOracle oracle = SampleOracle::make_exact(Distribution({0.4, 0.6}));
  PrimalTranscript pt = run_primal_game(
      kCorners, 0.3, max_entropy_primal_player(kCorners, 0.3),
      progress_adversary(kCorners, oracle, 0.15, 0.1), 1000);
  const std::string ptext = serialize_transcript(pt);
  PrimalTranscript pback = parse_primal_transcript(ptext);
  CHECK(serialize_transcript(pback) == ptext);
}
