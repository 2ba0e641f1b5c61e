#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypsel/distribution.hpp"
#include "hypsel/rng.hpp"
#include "hypsel/sampling.hpp"
#include "hypsel/tv_geometry.hpp"

namespace hypsel {

// ---------------------------------------------------------------------------
// Primal game: the player names violated tests, the adversary raises u.
// ---------------------------------------------------------------------------

struct PrimalTranscript {
  double eps = 0.0;
  std::size_t rounds = 0;
  std::vector<DistanceVector> points;  // u_0, ..., u_rounds (u_0 = 0)
  std::vector<TestDirection> tests;    // h_0, ..., h_{rounds-1}
  bool terminated = false;             // violated-test set emptied
};

struct PrimalPlayerContext {
  std::size_t round;
  const DistanceVector& u;
  const ViolatedTestResult& violated;  // current certified solve at u
};
using PrimalPlayer = std::function<TestDirection(const PrimalPlayerContext&)>;
using PrimalAdversary = std::function<DistanceVector(
    std::size_t round, const DistanceVector& u, const TestDirection& h)>;

/// True iff u_next >= u_k and h_k.u_next >= support_min(h_k) - eps/2 - 1e-9.
bool validate_primal_move(const DistanceVector& u_k, const TestDirection& h_k,
                          const DistanceVector& u_next, double eps,
                          const HypothesisClass& Q);

/// Alternates player and adversary until the violated-test set at margin eps
/// is emptied (slack eps/8) or max_rounds is reached. Throws on an illegal
/// move, naming the offender and the round.
PrimalTranscript run_primal_game(const HypothesisClass& Q, double eps,
                                 const PrimalPlayer& player,
                                 const PrimalAdversary& adversary,
                                 std::size_t max_rounds,
                                 SupportCache* cache = nullptr);

/// Built-in players/adversaries for the primal game.
PrimalPlayer max_entropy_primal_player(const HypothesisClass& Q, double eps,
                                       SupportCache* cache = nullptr);
PrimalAdversary progress_adversary(const HypothesisClass& Q,
                                   SampleOracle& oracle, double alpha,
                                   double beta, SupportCache* cache = nullptr);

// ---------------------------------------------------------------------------
// Cutting-with-margin game over the simplex of directions.
// ---------------------------------------------------------------------------

/// One halfspace cut; the kept side is {h : normal.h <= offset}.
struct DualCut {
  std::vector<double> normal;
  double offset = 0.0;
};

/// The current universe: the simplex intersected with all cuts so far.
struct DualUniverse {
  std::size_t n = 0;
  double eps = 0.0;
  std::vector<DualCut> cuts;

  bool contains(const std::vector<double>& h, double tol = 1e-9) const;
};

/// Legality of answering the pick h with `cut`: the kept side must not meet
/// the l1 ball of radius eps around h. Exact support-function test.
bool cut_is_legal(const DualCut& cut, const std::vector<double>& h, double eps);

struct DualPlayerContext {
  const DualUniverse& universe;
  std::size_t round;
  /// A strictly interior point of the universe (from the margin LP) together
  /// with its uniform slack; players may use it as a feasibility anchor.
  const std::vector<double>& interior;
  double interior_margin;
};
using DualPlayer = std::function<std::vector<double>(const DualPlayerContext&)>;

struct DualAdversaryContext {
  const DualUniverse& universe;
  std::size_t round;
  const std::vector<double>& pick;
  const std::vector<double>& interior;
};
/// Returning nullopt replaces the universe by the empty set (always legal).
using DualAdversary =
    std::function<std::optional<DualCut>(const DualAdversaryContext&)>;

struct DualTranscript {
  std::size_t n = 0;
  double eps = 0.0;
  std::size_t rounds = 0;
  std::vector<std::vector<double>> picks;
  std::vector<std::optional<DualCut>> cuts;  // one reply per pick
};

DualTranscript run_dual_game(std::size_t n, double eps,
                             const DualPlayer& player,
                             const DualAdversary& adversary,
                             std::size_t max_rounds);

/// Built-in dual players.
DualPlayer max_entropy_dual_player();
/// First feasible candidate in a fixed vertex-biased scan order; throws on an
/// empty universe.
std::vector<double> arbitrary_test_player(const DualPlayerContext& ctx);

/// Built-in adversaries.
DualAdversary greedy_diameter_adversary();
DualAdversary random_direction_adversary(std::uint64_t seed);
/// Cuts induced by the update steps of a primal-game run on (Q, target).
DualAdversary primal_induced_adversary(const HypothesisClass& Q,
                                       const Distribution& target,
                                       double primal_eps);

/// ceil(8 ln n / eps^2): round bound for the max-entropy player.
std::size_t dual_round_bound(std::size_t n, double eps);

// ---------------------------------------------------------------------------
// Transcript serialization: one move per line, values at 12 significant
// digits, replayable.
// ---------------------------------------------------------------------------

std::string serialize_transcript(const PrimalTranscript& t);
PrimalTranscript parse_primal_transcript(const std::string& text);
std::string serialize_transcript(const DualTranscript& t);
DualTranscript parse_dual_transcript(const std::string& text);

}  // namespace hypsel
