#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hypsel/distribution.hpp"

namespace hypsel {

/// Value and witnesses of the weighted support minimization
///   min_{p' in simplex(X)} sum_i h_i TV(p', q_i).
struct GameValueResult {
  double value = 0.0;
  Distribution witness;  // a minimizing p'
  /// One discriminating function per hypothesis, as per-element values in
  /// [0,1]. Certified so that min_{p'} sum_i h_i (E_{p'}[F_i] - E_{q_i}[F_i])
  /// equals `value` up to `gap`.
  std::vector<std::vector<double>> discriminators;
  double gap = 0.0;  // duality-gap certificate, >= 0 up to rounding
};

/// A distance point together with a margin, the query shape shared by the
/// violated-test operations.
struct MarginQuery {
  DistanceVector u;
  double eps = 0.0;

  MarginQuery(DistanceVector u_, double eps_);
};

/// Cache of support-minimization witnesses for one hypothesis class. Reusing
/// witnesses across calls warm-starts the cutting-plane solves; every cached
/// entry stays valid for any query point because it stores raw distances.
/// Single-consumer: share one instance per run, not across threads.
class SupportCache {
 public:
  struct Piece {
    std::vector<double> distances;  // TV(p_s, q_i) for every i
    std::vector<double> witness;    // p_s itself
    std::uint64_t stamp = 0;
  };

  std::vector<Piece>& pieces() { return pieces_; }
  std::uint64_t next_stamp() { return ++clock_; }
  void add(std::vector<double> distances, std::vector<double> witness);
  static constexpr std::size_t kCapacity = 192;

 private:
  std::vector<Piece> pieces_;
  std::uint64_t clock_ = 0;
};

/// Exact solve of the support minimization for a fixed direction h.
/// The returned discriminators satisfy the sign pattern
///   F_i(x) = 1 where witness(x) > q_i(x), F_i(x) = 0 where witness(x) < q_i(x),
/// with deterministic fractional values on equality points chosen so the
/// duality certificate holds (see gap).
GameValueResult support_min(const TestDirection& h, const HypothesisClass& Q,
                            double tol);

/// G(h) = support_min(h).value - h.u; the margin parameter carried by the
/// query is ignored (kept for call symmetry with the violated-test ops).
double margin(const TestDirection& h, const MarginQuery& query,
              const HypothesisClass& Q);

/// Result of maximizing G over the simplex of directions.
struct ViolatedTestResult {
  double value = 0.0;        // best certified lower bound on max_h G(h)
  double upper_bound = 0.0;  // certified upper bound
  double gap = 0.0;          // upper_bound - value
  TestDirection maximizer;   // attains `value`
  /// Convex combination of support witnesses: satisfies
  /// TV(dominator, q_i) - u_i <= upper_bound for every i.
  Distribution dominator;

  bool nonempty(double eps, double tol) const { return value > eps + tol; }
};

/// Exact maximization of G(h) over the simplex via cutting planes with a
/// matrix-game master problem; certified two-sided. The violated-test set for
/// (u, eps) is declared nonempty iff value > eps + tol.
ViolatedTestResult violated_test_value(const MarginQuery& query,
                                       const HypothesisClass& Q, double tol,
                                       SupportCache* cache = nullptr);

/// Indicator of {x : q_i(x) >= q_j(x)}; requires i != j.
std::vector<int> yatracos_set(std::size_t i, std::size_t j,
                              const HypothesisClass& Q);

/// Given a certified near-feasible point (violated_test_value(u, eps) <=
/// eps + tol), produce r with TV(r, q_i) <= u_i + eps + 2*tol for all i.
Distribution feasibility_round(const DistanceVector& u, double eps,
                               const HypothesisClass& Q, double tol,
                               SupportCache* cache = nullptr);

}  // namespace hypsel
