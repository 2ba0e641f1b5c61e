#pragma once

#include <cstddef>
#include <vector>

#include "hypsel/distribution.hpp"
#include "hypsel/tv_geometry.hpp"

namespace hypsel {

/// Output of the constrained entropy maximization.
struct EntropySolution {
  TestDirection h;
  double attained_entropy = 0.0;  // nats, floored evaluation
  double certified_margin = 0.0;  // exact G(h)
  double gap_certificate = 0.0;   // dual entropy bound minus attained
};

/// Maximize entropy over the violated-test set {h : G(h) >= eps + tol}.
/// Precondition: violated_test_value((u, eps)) > eps + tol. The returned
/// direction satisfies G(h) >= eps + tol/2 exactly (re-verified), and its
/// entropy is within gap_certificate of the constrained supremum.
EntropySolution max_entropy_test(const DistanceVector& u, double eps,
                                 const HypothesisClass& Q, double tol,
                                 SupportCache* cache = nullptr);

/// KL(q,p) - KL(q,qstar) - KL(qstar,p). Nonnegative whenever qstar is the
/// KL projection of p onto a convex set containing q. Any infinite
/// divergence yields +infinity.
double pythagorean_gap(const TestDirection& q, const TestDirection& qstar,
                       const TestDirection& p);

/// Entropy evaluated with coordinates floored at 1e-12; perturbs the value
/// by at most n * 1e-12 * |ln 1e-12|.
double floored_entropy(std::span<const double> weights);

/// Entropy maximization over the cut polytope {h in simplex : a_l.h <= b_l},
/// solved through the smooth softmax dual. `anchor`, when given, must be
/// strictly feasible; the near-optimal dual point is blended toward it just
/// enough to restore exact feasibility.
struct PolytopeEntropyResult {
  bool feasible = false;
  std::vector<double> h;        // exactly feasible point
  double entropy_value = 0.0;   // floored entropy of h
  double upper_bound = 0.0;     // certified bound on the constrained max
};
PolytopeEntropyResult max_entropy_over_polytope(
    std::size_t n, const std::vector<std::vector<double>>& normals,
    const std::vector<double>& offsets,
    const std::vector<double>* anchor = nullptr,
    std::vector<double>* warm_multipliers = nullptr);

}  // namespace hypsel
