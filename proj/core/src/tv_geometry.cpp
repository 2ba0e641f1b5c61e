#include "hypsel/tv_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hypsel/simplex_lp.hpp"

namespace hypsel {

namespace {

constexpr double kExactGapTol = 3e-9;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Light result of the exact support minimization: value, a minimizing p',
/// the distance profile of that p', and the multiplier that certifies it.
struct SupportEval {
  double value = 0.0;
  double lambda = 0.0;  // breakpoint multiplier; dual threshold is 0.5+lambda
  std::vector<double> witness;
  std::vector<double> distances;
};

/// Minimize sum_x g_x(t_x) over the simplex, where
///   g_x(t) = 0.5 * sum_i h_i |t - q_i(x)|
/// is piecewise linear and convex. A single multiplier lambda prices the mass
/// constraint; per element the minimizer set is an interval between value
/// breakpoints, so scanning candidate slopes solves the problem exactly.
SupportEval support_min_eval(const std::vector<double>& h,
                             const HypothesisClass& Q) {
  const std::size_t n = Q.size();
  const std::size_t D = Q.domain_size();

  // Per element: distinct breakpoints with cumulative weight strictly below
  // or equal each one.
  struct Element {
    std::vector<double> bp;     // distinct q values, ascending
    std::vector<double> sigma;  // sigma[j]: slope just right of bp[j]
  };
  std::vector<Element> elems(D);
  std::vector<std::pair<double, double>> scratch(n);
  std::vector<double> candidates;
  candidates.reserve(D * (n + 1) + 1);
  candidates.push_back(-0.5);

  for (std::size_t x = 0; x < D; ++x) {
    for (std::size_t i = 0; i < n; ++i) scratch[i] = {Q[i][x], h[i]};
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Element& e = elems[x];
    double cum = 0.0;
    for (std::size_t i = 0; i < n;) {
      const double v = scratch[i].first;
      double w = 0.0;
      while (i < n && scratch[i].first == v) w += scratch[i++].second;
      cum += w;
      e.bp.push_back(v);
      e.sigma.push_back(cum - 0.5);
      candidates.push_back(cum - 0.5);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  // Minimizer interval of g_x(t) - lambda*t over t >= 0.
  constexpr double kCap = 2.0;
  auto interval = [](const Element& e, double lambda) {
    double lo, hi;
    if (e.bp.front() > 0.0 && lambda <= -0.5) {
      lo = 0.0;
    } else {
      std::size_t j = 0;
      while (e.sigma[j] < lambda) ++j;  // sigma.back() == 0.5 >= lambda
      lo = e.bp[j];
    }
    // Largest breakpoint whose left slope is <= lambda, +inf if the final
    // slope qualifies.
    std::size_t k = e.sigma.size();
    while (k > 0 && e.sigma[k - 1] > lambda) --k;
    hi = (k == e.sigma.size()) ? kCap + lo : e.bp[k];
    return std::pair<double, double>{lo, hi};
  };

  // Smallest candidate lambda whose maximal total mass reaches 1.
  auto total_max = [&](double lambda) {
    double acc = 0.0;
    for (const Element& e : elems) acc += interval(e, lambda).second;
    return acc;
  };
  std::size_t lo_idx = 0, hi_idx = candidates.size() - 1;
  while (lo_idx < hi_idx) {
    const std::size_t mid = (lo_idx + hi_idx) / 2;
    if (total_max(candidates[mid]) >= 1.0) {
      hi_idx = mid;
    } else {
      lo_idx = mid + 1;
    }
  }
  const double lambda = candidates[lo_idx];

  SupportEval out;
  out.lambda = lambda;
  out.witness.resize(D);
  double total_min = 0.0;
  std::vector<std::pair<double, double>> ivs(D);
  for (std::size_t x = 0; x < D; ++x) {
    ivs[x] = interval(elems[x], lambda);
    out.witness[x] = ivs[x].first;
    total_min += ivs[x].first;
  }
  double need = 1.0 - total_min;
  if (need < 0.0) {
    if (need < -1e-9) {
      throw std::runtime_error("support_min: multiplier search failed");
    }
    need = 0.0;
  }
  for (std::size_t x = 0; x < D && need > 0.0; ++x) {
    const double cap = ivs[x].second - ivs[x].first;
    if (need >= cap) {
      // Saturate exactly onto the right breakpoint; adding the difference
      // instead can land one ulp past it and flip the equality pattern.
      out.witness[x] = ivs[x].second;
      need -= cap;
    } else {
      out.witness[x] += need;
      need = 0.0;
    }
  }
  if (need > 1e-9) {
    throw std::runtime_error("support_min: mass distribution failed");
  }

  out.distances.resize(n);
  out.value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t x = 0; x < D; ++x) acc += std::fabs(out.witness[x] - Q[i][x]);
    out.distances[i] = 0.5 * acc;
    out.value += h[i] * out.distances[i];
  }
  return out;
}

/// Discriminators from the witness sign pattern. On equality points the
/// values are filled so that psi(x) = sum_i h_i F_i(x) equals the dual
/// threshold 0.5 + lambda wherever the subdifferential allows, which is what
/// makes the functions a valid certificate for every p'.
std::vector<std::vector<double>> build_discriminators(
    const std::vector<double>& h, const HypothesisClass& Q,
    const SupportEval& ev) {
  const std::size_t n = Q.size();
  const std::size_t D = Q.domain_size();
  const double threshold = 0.5 + ev.lambda;
  std::vector<std::vector<double>> F(n, std::vector<double>(D, 0.0));
  for (std::size_t x = 0; x < D; ++x) {
    const double w = ev.witness[x];
    double below = 0.0, equal = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (Q[i][x] < w) {
        below += h[i];
      } else if (Q[i][x] == w) {
        equal += h[i];
      }
    }
    double budget = std::clamp(threshold - below, 0.0, equal);
    for (std::size_t i = 0; i < n; ++i) {
      const double q = Q[i][x];
      if (q < w) {
        F[i][x] = 1.0;
      } else if (q == w) {
        if (h[i] == 0.0) {
          F[i][x] = 1.0;
        } else {
          const double f = std::min(1.0, budget / h[i]);
          F[i][x] = f;
          budget -= f * h[i];
        }
      }
    }
  }
  return F;
}

double certificate_gap(const std::vector<double>& h, const HypothesisClass& Q,
                       const std::vector<std::vector<double>>& F,
                       double value) {
  const std::size_t n = Q.size();
  const std::size_t D = Q.domain_size();
  double min_psi = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < D; ++x) {
    double psi = 0.0;
    for (std::size_t i = 0; i < n; ++i) psi += h[i] * F[i][x];
    min_psi = std::min(min_psi, psi);
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double eq = 0.0;
    for (std::size_t x = 0; x < D; ++x) eq += Q[i][x] * F[i][x];
    cost += h[i] * eq;
  }
  return value - (min_psi - cost);
}

void check_query(const MarginQuery& query, const HypothesisClass& Q) {
  if (query.u.size() != Q.size()) {
    throw std::invalid_argument("margin query length does not match class size");
  }
}

}  // namespace

MarginQuery::MarginQuery(DistanceVector u_, double eps_)
    : u(std::move(u_)), eps(eps_) {
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("MarginQuery: eps must be >= 0");
  }
}

void SupportCache::add(std::vector<double> distances,
                       std::vector<double> witness) {
  // Near-duplicate distance profiles add nothing to the masters and breed
  // degenerate LP columns.
  for (Piece& p : pieces_) {
    bool same = p.distances.size() == distances.size();
    for (std::size_t i = 0; same && i < distances.size(); ++i) {
      if (std::fabs(p.distances[i] - distances[i]) > 1e-12) same = false;
    }
    if (same) {
      p.stamp = next_stamp();
      return;
    }
  }
  if (pieces_.size() >= kCapacity) {
    // Drop the stalest quarter, keeping relative order stable.
    std::vector<std::uint64_t> stamps;
    stamps.reserve(pieces_.size());
    for (const Piece& p : pieces_) stamps.push_back(p.stamp);
    std::nth_element(stamps.begin(), stamps.begin() + kCapacity / 4,
                     stamps.end());
    const std::uint64_t cutoff = stamps[kCapacity / 4];
    std::erase_if(pieces_, [cutoff](const Piece& p) { return p.stamp <= cutoff; });
  }
  pieces_.push_back(
      Piece{std::move(distances), std::move(witness), next_stamp()});
}

GameValueResult support_min(const TestDirection& h, const HypothesisClass& Q,
                            double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("support_min: tol must be positive");
  }
  if (h.size() != Q.size()) {
    throw std::invalid_argument("support_min: direction length mismatch");
  }
  SupportEval ev = support_min_eval(h.weights(), Q);
  GameValueResult out{ev.value, Distribution(ev.witness), {}, 0.0};
  out.discriminators = build_discriminators(h.weights(), Q, ev);
  out.gap = certificate_gap(h.weights(), Q, out.discriminators, ev.value);
  if (std::fabs(out.gap) > std::max(tol, kExactGapTol)) {
    throw std::runtime_error("support_min: certificate gap " +
                             std::to_string(out.gap) + " exceeds tolerance");
  }
  return out;
}

double margin(const TestDirection& h, const MarginQuery& query,
              const HypothesisClass& Q) {
  check_query(query, Q);
  if (h.size() != Q.size()) {
    throw std::invalid_argument("margin: direction length mismatch");
  }
  SupportEval ev = support_min_eval(h.weights(), Q);
  return ev.value - dot(h.weights(), query.u.values);
}

ViolatedTestResult violated_test_value(const MarginQuery& query,
                                       const HypothesisClass& Q, double tol,
                                       SupportCache* cache) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("violated_test_value: tol must be positive");
  }
  check_query(query, Q);
  const std::size_t n = Q.size();
  const std::vector<double>& u = query.u.values;

  SupportCache local;
  SupportCache& pool = cache ? *cache : local;
  if (pool.pieces().empty()) {
    SupportEval ev = support_min_eval(std::vector<double>(n, 1.0 / n), Q);
    pool.add(std::move(ev.distances), std::move(ev.witness));
  }

  const std::size_t D = Q.domain_size();
  double best_lb = -std::numeric_limits<double>::infinity();
  std::vector<double> best_h(n, 1.0 / n);
  double upper = std::numeric_limits<double>::infinity();
  std::vector<double> mix(D, 0.0);

  const std::size_t max_rounds = 160 + 16 * n;
  const std::size_t stagnation_window = 2 * n + 20;
  double prev_upper = std::numeric_limits<double>::infinity();
  std::size_t stagnant = 0;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    auto& pieces = pool.pieces();
    const std::size_t S = pieces.size();
    std::vector<double> payoff(n * S);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        payoff[i * S + s] = pieces[s].distances[i] - u[i];
      }
    }
    lp::MatrixGameResult game = lp::solve_matrix_game(n, S, payoff);
    if (game.status != lp::Status::optimal) {
      // Keep the certificates from the last solved master; they stay valid.
      if (round > 0 && std::isfinite(upper)) break;
      throw std::runtime_error(
          "violated_test_value: master LP failed (status " +
          std::to_string(static_cast<int>(game.status)) + ", pieces " +
          std::to_string(S) + ")");
    }
    upper = game.value;

    // Fold the dual weights into a dominating mixture now, while the weights
    // still index the current piece list; TV convexity keeps its profile
    // under the master bound.
    std::fill(mix.begin(), mix.end(), 0.0);
    double wsum = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double b = game.col_strategy[s];
      if (b <= 0.0) continue;
      for (std::size_t x = 0; x < D; ++x) mix[x] += b * pieces[s].witness[x];
      wsum += b;
      pieces[s].stamp = pool.next_stamp();
    }
    if (wsum <= 0.0) {
      mix = pieces.front().witness;
    } else {
      for (double& v : mix) v /= wsum;
    }

    // Repair tiny negative strategy entries from the LP.
    double hs = 0.0;
    for (double& w : game.row_strategy) {
      w = std::max(w, 0.0);
      hs += w;
    }
    for (double& w : game.row_strategy) w /= hs;

    SupportEval ev = support_min_eval(game.row_strategy, Q);
    const double g_here = ev.value - dot(game.row_strategy, u);
    if (g_here > best_lb) {
      best_lb = g_here;
      best_h = game.row_strategy;
    }
    if (upper - best_lb <= std::min(tol, kExactGapTol)) break;
    if (upper > prev_upper - 1e-13) {
      if (++stagnant > stagnation_window) break;  // keep the achieved gap
    } else {
      stagnant = 0;
    }
    prev_upper = upper;
    pool.add(std::move(ev.distances), std::move(ev.witness));
  }

  ViolatedTestResult out{best_lb, std::max(upper, best_lb),
                         std::max(upper, best_lb) - best_lb,
                         TestDirection(best_h), Distribution(mix)};
  return out;
}

std::vector<int> yatracos_set(std::size_t i, std::size_t j,
                              const HypothesisClass& Q) {
  if (i >= Q.size() || j >= Q.size()) {
    throw std::invalid_argument("yatracos_set: index out of range");
  }
  if (i == j) {
    throw std::invalid_argument("yatracos_set: indices must differ");
  }
  std::vector<int> ind(Q.domain_size());
  for (std::size_t x = 0; x < Q.domain_size(); ++x) {
    ind[x] = Q[i][x] >= Q[j][x] ? 1 : 0;
  }
  return ind;
}

Distribution feasibility_round(const DistanceVector& u, double eps,
                               const HypothesisClass& Q, double tol,
                               SupportCache* cache) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("feasibility_round: tol must be positive");
  }
  MarginQuery query(u, eps);
  ViolatedTestResult vt = violated_test_value(query, Q, tol, cache);
  if (vt.value > eps + tol) {
    throw std::runtime_error(
        "feasibility_round: input not certified near-feasible (margin " +
        std::to_string(vt.value) + " > " + std::to_string(eps + tol) + ")");
  }
  // The dominator satisfies TV(r, q_i) - u_i <= upper_bound <= eps+tol+gap.
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const double d = tv_distance(vt.dominator, Q[i]);
    if (d > u.values[i] + eps + 2.0 * tol) {
      throw std::runtime_error("feasibility_round: witness check failed");
    }
  }
  return vt.dominator;
}

}  // namespace hypsel
