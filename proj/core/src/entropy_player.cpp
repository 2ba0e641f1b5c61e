#include "hypsel/entropy_player.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hypsel {

namespace {

constexpr double kEntropyFloor = 1e-12;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Softmax dual of the entropy maximization: for multipliers mu >= 0,
///   D(mu) = log sum_i exp(-(A^T mu)_i) + mu.b  >=  max{H(h) : A h <= b}.
struct DualEval {
  double value;
  std::vector<double> h;         // softmax point
  std::vector<double> gradient;  // b - A h
};

DualEval eval_dual(const std::vector<double>& mu,
                   const std::vector<std::vector<double>>& normals,
                   const std::vector<double>& offsets, std::size_t n) {
  std::vector<double> theta(n, 0.0);
  for (std::size_t l = 0; l < normals.size(); ++l) {
    const double m = mu[l];
    if (m == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) theta[i] -= m * normals[l][i];
  }
  const double tmax = *std::max_element(theta.begin(), theta.end());
  double z = 0.0;
  for (double t : theta) z += std::exp(t - tmax);
  DualEval ev;
  ev.value = tmax + std::log(z) + dot(mu, offsets);
  ev.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) ev.h[i] = std::exp(theta[i] - tmax) / z;
  ev.gradient.resize(normals.size());
  for (std::size_t l = 0; l < normals.size(); ++l) {
    ev.gradient[l] = offsets[l] - dot(normals[l], ev.h);
  }
  return ev;
}

}  // namespace

double floored_entropy(std::span<const double> weights) {
  double acc = 0.0;
  for (double w : weights) {
    const double v = std::max(w, kEntropyFloor);
    acc -= v * std::log(v);
  }
  return acc;
}

PolytopeEntropyResult max_entropy_over_polytope(
    std::size_t n, const std::vector<std::vector<double>>& normals,
    const std::vector<double>& offsets, const std::vector<double>* anchor,
    std::vector<double>* warm_multipliers) {
  const std::size_t L = normals.size();
  PolytopeEntropyResult out;
  if (L == 0) {
    out.feasible = true;
    out.h.assign(n, 1.0 / static_cast<double>(n));
    out.entropy_value = floored_entropy(out.h);
    out.upper_bound = std::log(static_cast<double>(n));
    return out;
  }

  std::vector<double> mu(L, 0.0);
  if (warm_multipliers && warm_multipliers->size() <= L) {
    std::copy(warm_multipliers->begin(), warm_multipliers->end(), mu.begin());
  }
  DualEval cur = eval_dual(mu, normals, offsets, n);

  // Projected gradient with Barzilai-Borwein steps and a nonmonotone
  // safeguard; the dual is smooth so this converges fast and the final value
  // is a certified upper bound regardless of where we stop.
  std::vector<double> mu_prev = mu, grad_prev = cur.gradient;
  double step = 1.0;
  std::vector<double> recent(10, cur.value);
  const std::size_t max_iter = 4000;
  for (std::size_t it = 0; it < max_iter; ++it) {
    double gnorm = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double g = cur.gradient[l];
      // Projected gradient: at mu_l = 0 only descent directions count.
      if (mu[l] > 0.0 || g < 0.0) gnorm = std::max(gnorm, std::fabs(g));
    }
    if (gnorm <= 1e-12 * (1.0 + std::fabs(cur.value))) break;

    std::vector<double> trial(L);
    double worst = *std::max_element(recent.begin(), recent.end());
    double alpha = step;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t l = 0; l < L; ++l) {
        trial[l] = std::max(0.0, mu[l] - alpha * cur.gradient[l]);
      }
      DualEval ev = eval_dual(trial, normals, offsets, n);
      if (ev.value <= worst - 1e-16 || bt == 39) {
        // BB step from the accepted move.
        double ss = 0.0, sy = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          const double s = trial[l] - mu[l];
          const double y = ev.gradient[l] - cur.gradient[l];
          ss += s * s;
          sy += s * y;
        }
        mu_prev = mu;
        grad_prev = cur.gradient;
        mu = trial;
        cur = ev;
        step = (sy > 1e-16) ? std::clamp(ss / sy, 1e-10, 1e8) : alpha * 2.0;
        accepted = true;
        break;
      }
      alpha *= 0.25;
    }
    if (!accepted) break;
    recent[it % recent.size()] = cur.value;

    if (cur.value < -1e8) break;  // dual unbounded below: empty polytope
  }

  out.upper_bound = cur.value;
  if (cur.value < -1e8) {
    out.feasible = false;
    return out;
  }
  if (warm_multipliers) *warm_multipliers = mu;

  // Restore exact feasibility by blending toward the strictly feasible
  // anchor just as far as the worst violation requires.
  std::vector<double> h = cur.h;
  if (anchor) {
    double theta = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double viol = dot(normals[l], h) - offsets[l];
      if (viol <= 0.0) continue;
      const double slack = offsets[l] - dot(normals[l], *anchor);
      if (slack <= 0.0) {
        theta = 1.0;
        break;
      }
      theta = std::max(theta, viol / (viol + slack));
    }
    if (theta > 0.0) {
      theta = std::min(1.0, theta * (1.0 + 1e-12) + 1e-15);
      for (std::size_t i = 0; i < n; ++i) {
        h[i] = (1.0 - theta) * h[i] + theta * (*anchor)[i];
      }
    }
  }
  double hs = 0.0;
  for (double v : h) hs += v;
  for (double& v : h) v /= hs;

  out.feasible = true;
  out.h = std::move(h);
  out.entropy_value = floored_entropy(out.h);
  return out;
}

EntropySolution max_entropy_test(const DistanceVector& u, double eps,
                                 const HypothesisClass& Q, double tol,
                                 SupportCache* cache) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("max_entropy_test: tol must be positive");
  }
  const std::size_t n = Q.size();
  MarginQuery query(u, eps);

  SupportCache local;
  SupportCache& pool = cache ? *cache : local;
  ViolatedTestResult vt = violated_test_value(query, Q, tol, &pool);
  if (!(vt.value > eps + tol)) {
    throw std::runtime_error(
        "max_entropy_test: violated-test set empty at the requested margin (" +
        std::to_string(vt.value) + " <= " + std::to_string(eps + tol) + ")");
  }
  const double c_master = eps + tol;
  const double c_final = eps + 0.5 * tol;

  // The unconstrained entropy maximizer wins outright when feasible.
  TestDirection unif = TestDirection::uniform(n);
  if (margin(unif, query, Q) >= c_final) {
    return EntropySolution{unif, floored_entropy(unif.weights()),
                           margin(unif, query, Q), 0.0};
  }

  const std::vector<double>& anchor = vt.maximizer.weights();
  std::vector<double> warm_mu;
  double ent_ub = std::log(static_cast<double>(n));
  std::vector<double> best_h = anchor;
  double best_ent = floored_entropy(anchor);

  const std::size_t max_rounds = 120;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const auto& pieces = pool.pieces();
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    normals.reserve(pieces.size());
    for (const auto& piece : pieces) {
      // G(h) <= g_s.h pointwise, so G >= c relaxes to -g_s.h <= -c.
      std::vector<double> row(n);
      for (std::size_t i = 0; i < n; ++i) row[i] = -(piece.distances[i] - u.values[i]);
      normals.push_back(std::move(row));
      offsets.push_back(-c_master);
    }
    warm_mu.resize(normals.size(), 0.0);
    PolytopeEntropyResult pe = max_entropy_over_polytope(
        n, normals, offsets, &anchor, &warm_mu);
    if (!pe.feasible) break;  // fall through to the blended best
    ent_ub = std::min(ent_ub, pe.upper_bound);

    GameValueResult sm = support_min(TestDirection(pe.h), Q, 1.0);
    const double g_here = sm.value - dot(pe.h, u.values);
    pool.add(distance_vector(sm.witness, Q).values, sm.witness.probs());
    if (g_here >= c_final) {
      return EntropySolution{TestDirection(pe.h), floored_entropy(pe.h),
                             g_here, std::max(0.0, ent_ub - pe.entropy_value)};
    }
    if (pe.entropy_value > best_ent && g_here > eps) {
      best_h = pe.h;
      best_ent = pe.entropy_value;
    }
  }

  // Round cap: blend the best candidate toward the exact anchor until the
  // margin constraint is met (concavity of G makes one step sufficient).
  double lo = 0.0, hi = 1.0;
  std::vector<double> blend(n);
  for (int it = 0; it < 60; ++it) {
    const double theta = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i) {
      blend[i] = (1.0 - theta) * best_h[i] + theta * anchor[i];
    }
    const double g = margin(TestDirection(blend), query, Q);
    if (g >= c_final) {
      hi = theta;
    } else {
      lo = theta;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    blend[i] = (1.0 - hi) * best_h[i] + hi * anchor[i];
  }
  TestDirection hb(blend);
  const double g_final = margin(hb, query, Q);
  if (g_final < c_final) {
    // Anchor itself always qualifies.
    hb = vt.maximizer;
  }
  const double att = floored_entropy(hb.weights());
  return EntropySolution{hb, att, margin(hb, query, Q),
                         std::max(0.0, ent_ub - att)};
}

double pythagorean_gap(const TestDirection& q, const TestDirection& qstar,
                       const TestDirection& p) {
  const double a = kl_divergence(q, p);
  const double b = kl_divergence(q, qstar);
  const double c = kl_divergence(qstar, p);
  if (std::isinf(a) || std::isinf(b) || std::isinf(c)) {
    return std::numeric_limits<double>::infinity();
  }
  return a - b - c;
}

}  // namespace hypsel
