#include "hypsel/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hypsel/entropy_player.hpp"
#include "hypsel/games.hpp"

namespace hypsel {

namespace {

constexpr double kRoundTol = 1e-6;   // feasibility rounding accuracy
constexpr double kBudgetPad = 3e-6;  // kept out of eps for the rounding step
constexpr double kExactTol = 1e-9;   // violated-test solve accuracy

double safe_log_n(std::size_t n) {
  return std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
}

double default_gamma_base(std::size_t n, double eps, double delta) {
  return delta * eps * eps / (64.0 * safe_log_n(n) * std::log(2.0 / eps));
}

bool degenerate_shortcut(const HypothesisClass& Q, double eps,
                         Distribution* out) {
  if (Q.size() == 1 || eps >= 2.0) {
    *out = Q[0];
    return true;
  }
  return false;
}

void reset_report(RunReport* report, const char* name) {
  if (!report) return;
  *report = RunReport{};
  report->algorithm = name;
}

void finish_report(RunReport* report, const Distribution& out,
                   SampleOracle& oracle, std::uint64_t samples_at_entry) {
  if (!report) return;
  report->samples_used = oracle.samples_drawn() - samples_at_entry;
  report->output_probs = out.probs();
}

}  // namespace

void RefinedParams::validate() const {
  if (!(C2 > 32.0)) throw std::invalid_argument("RefinedParams: need C2 > 32");
  if (!(C0 >= 4.0 * C2)) {
    throw std::invalid_argument("RefinedParams: need C0 >= 4*C2");
  }
  if (!(C1 >= 8.0)) throw std::invalid_argument("RefinedParams: need C1 >= 8");
  if (restart_cap < 1) {
    throw std::invalid_argument("RefinedParams: need restart_cap >= 1");
  }
}

std::size_t yatracos_sample_size(std::size_t n, double eps, double delta) {
  const double m =
      8.0 * (2.0 * safe_log_n(n) + std::log(2.0 / delta)) / (eps * eps);
  return static_cast<std::size_t>(std::ceil(m));
}

std::size_t slice_count(double d) {
  return 2 + static_cast<std::size_t>(std::ceil(std::log2(1.0 + 1.0 / d)));
}

std::size_t slice_sample_size(double d, double gamma, double C1,
                              std::size_t j) {
  // ceil(C1 * ln(ln(1/d)/gamma) * 4^j). The inner log degenerates as d -> 1,
  // so it is floored at 1e-2 and the whole factor at 1.
  const double inner = std::max(std::log(1.0 / d), 1e-2);
  const double factor = std::max(1.0, std::log(inner / gamma));
  return static_cast<std::size_t>(
      std::ceil(C1 * factor * std::pow(4.0, static_cast<double>(j))));
}

Distribution yatracos_select(const HypothesisClass& Q, SampleOracle& oracle,
                             double eps, double delta, RunReport* report) {
  const std::uint64_t s0 = oracle.samples_drawn();
  reset_report(report, "yatracos");
  const std::size_t n = Q.size();
  Distribution out = Q[0];
  if (n == 1) {
    finish_report(report, out, oracle, s0);
    return out;
  }
  const std::size_t d = Q.domain_size();

  // All ordered discriminating sets share one batch.
  std::vector<std::vector<double>> sets;
  sets.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<int> ind = yatracos_set(i, j, Q);
      sets.emplace_back(ind.begin(), ind.end());
    }
  }
  const std::size_t m = yatracos_sample_size(n, eps, delta);
  std::vector<double> phat = oracle.estimate_expectations(sets, m);

  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double score = 0.0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      double qa = 0.0;
      for (std::size_t x = 0; x < d; ++x) qa += sets[s][x] * Q[i][x];
      score = std::max(score, std::fabs(phat[s] - qa));
    }
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  out = Q[best];
  if (report) report->rounds = 1;
  finish_report(report, out, oracle, s0);
  return out;
}

Distribution basic_select(const HypothesisClass& Q, SampleOracle& oracle,
                          double eps, double delta, RunReport* report) {
  if (!(eps > 0.0)) throw std::invalid_argument("basic_select: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("basic_select: delta must lie in (0,1)");
  }
  const std::uint64_t s0 = oracle.samples_drawn();
  reset_report(report, "basic");
  Distribution out = Q[0];
  if (degenerate_shortcut(Q, eps, &out)) {
    finish_report(report, out, oracle, s0);
    return out;
  }

  const std::size_t n = Q.size();
  // Budget split: the loop runs at a slightly tighter margin so that the
  // exit slack eps_play/8 plus the rounding tolerance still lands under eps.
  const double eps_play = 8.0 * (eps - kBudgetPad) / 9.0;
  const double tau = eps_play / 8.0;
  const double alpha = eps_play / 2.0;
  const std::size_t round_cap = dual_round_bound(n, eps_play / 4.0);
  const double beta = delta / static_cast<double>(round_cap);

  SupportCache cache;
  DistanceVector u = DistanceVector::zeros(n);
  std::size_t rounds = 0;
  while (true) {
    ViolatedTestResult vt =
        violated_test_value(MarginQuery(u, eps_play), Q, kExactTol, &cache);
    if (!(vt.value > eps_play + tau)) break;
    if (rounds >= round_cap) {
      throw std::runtime_error(
          "basic_select: round bound exceeded (solver tolerance misconfigured)");
    }
    EntropySolution es = max_entropy_test(u, eps_play, Q, tau, &cache);
    ProgressOutput po = progress_step(u, es.h, alpha, beta, oracle, Q, &cache);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = std::max(u[i], po.z[i]);
    u = DistanceVector(std::move(next));
    ++rounds;
  }
  out = feasibility_round(u, eps_play + tau, Q, kRoundTol, &cache);
  if (report) report->rounds = rounds;
  finish_report(report, out, oracle, s0);
  return out;
}

SliceResult refined_hypothesis_select(const DistanceVector& u,
                                      const TestDirection& h, double d,
                                      double dprime, double gamma,
                                      const RefinedParams& params,
                                      SampleOracle& oracle,
                                      const HypothesisClass& Q,
                                      SupportCache* cache) {
  params.validate();
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("refined_hypothesis_select: gamma must be > 0");
  }
  const std::size_t n = Q.size();
  GameValueResult sm = support_min(h, Q, 1.0);
  if (cache) {
    cache->add(distance_vector(sm.witness, Q).values, sm.witness.probs());
  }
  std::vector<double> eq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < Q.domain_size(); ++x) {
      eq[i] += sm.discriminators[i][x] * Q[i][x];
    }
  }

  SliceResult res;
  res.discriminators = sm.discriminators;
  const std::size_t j_max = slice_count(d);
  for (std::size_t j = 0; j <= j_max; ++j) {
    const std::size_t mj = slice_sample_size(d, gamma, params.C1, j);
    std::vector<double> est =
        oracle.estimate_expectations(sm.discriminators, mj);
    if (oracle.mode() == OracleMode::sampled) res.samples_used += mj;

    const double half_step = std::pow(2.0, -static_cast<double>(j) - 1.0);
    const double cap = std::pow(2.0, -static_cast<double>(j));
    std::vector<double> v(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = est[i] - eq[i];
      v[i] = std::clamp(std::max(u[i], w - half_step), 0.0, 1.0);
      sum += std::min(cap, v[i] - u[i]) * h[i];
    }
    if (sum > 2.0 * dprime) {
      res.success = true;
      res.j = j;
      res.v = DistanceVector(std::move(v));
      return res;
    }
  }
  return res;  // success = false
}

namespace {

/// Shared implementation of the refined run; records steps/events on demand.
Distribution refined_run_impl(const HypothesisClass& Q, SampleOracle& oracle,
                              double eps, double gamma_base,
                              const RefinedParams& params, RunReport* report,
                              std::vector<UpdateEvent>* events) {
  const std::size_t n = Q.size();
  const double log_n = safe_log_n(n);
  SupportCache cache;

  DistanceVector u = DistanceVector::zeros(n);
  ViolatedTestResult vt =
      violated_test_value(MarginQuery(u, 1.0), Q, kExactTol, &cache);

  double d = 1.0;
  std::size_t steps = 0;
  std::size_t restarts = 0;
  std::size_t level_steps = 0;
  const std::size_t outer_cap =
      64 + static_cast<std::size_t>(
               std::ceil(8.0 * params.C0 * std::pow(std::log(2.0 / eps), 2)));
  std::size_t outer_iters = 0;

  if (report) report->d_schedule.push_back(d);
  while (d > eps / 2.0) {
    if (++outer_iters > outer_cap) {
      throw std::runtime_error("refined run: margin schedule failed to shrink");
    }
    const double dprime = d / (params.C0 * std::log(1.0 + 1.0 / d));
    const double margin_level = d - dprime;

    const bool play = vt.value > margin_level + kExactTol &&
                      vt.upper_bound > margin_level + kExactTol;
    if (!play) {
      d = margin_level;
      level_steps = 0;
      if (report) report->d_schedule.push_back(d);
      continue;
    }

    const std::size_t level_cap = static_cast<std::size_t>(std::ceil(
        16.0 * log_n / (dprime * dprime)));
    if (++level_steps > level_cap) {
      throw std::runtime_error(
          "refined run: inner loop exceeded its step bound at a fixed level");
    }

    const double tol_me =
        std::max(std::min(dprime / 4.0, 0.5 * (vt.value - margin_level)),
                 1e-12);
    EntropySolution es = max_entropy_test(u, margin_level, Q, tol_me, &cache);

    const double gamma_lvl =
        std::max(std::min(d * d * d, gamma_base), 1e-300);
    SliceResult sr;
    for (std::size_t attempt = 0;; ++attempt) {
      sr = refined_hypothesis_select(u, es.h, d, dprime, gamma_lvl, params,
                                     oracle, Q, &cache);
      if (sr.success) break;
      if (++restarts > params.restart_cap) {
        throw std::runtime_error(
            "refined run: slice search failed beyond the restart cap");
      }
      if (oracle.mode() == OracleMode::exact) {
        throw std::runtime_error(
            "refined run: exact-mode slice search failed (margin certificate "
            "violated)");
      }
    }

    if (report) {
      StepRecord rec;
      rec.d = d;
      rec.dprime = dprime;
      rec.j = sr.j;
      rec.h = es.h.weights();
      rec.u_before = u.values;
      rec.u_after = sr.v.values;
      report->steps.push_back(std::move(rec));
      report->slice_js.push_back(sr.j);
    }
    if (events) {
      for (std::size_t i = 0; i < n; ++i) {
        if (sr.v[i] > u[i]) {
          double eq = 0.0;
          for (std::size_t x = 0; x < Q.domain_size(); ++x) {
            eq += sr.discriminators[i][x] * Q[i][x];
          }
          events->push_back(UpdateEvent{i, sr.j, sr.v[i], eq,
                                        sr.discriminators[i]});
        }
      }
    }
    u = sr.v;
    ++steps;
    vt = violated_test_value(MarginQuery(u, 1.0), Q, kExactTol, &cache);
  }

  Distribution out = feasibility_round(u, d, Q, kRoundTol, &cache);
  if (report) {
    report->rounds = steps;
    report->restarts = restarts;
  }
  return out;
}

}  // namespace

Distribution refined_primal_run(const HypothesisClass& Q, SampleOracle& oracle,
                                double eps, double delta,
                                const RefinedParams& params, RunReport* report,
                                std::vector<UpdateEvent>* events) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("refined_primal_run: eps must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("refined_primal_run: delta must lie in (0,1)");
  }
  params.validate();
  const std::uint64_t s0 = oracle.samples_drawn();
  reset_report(report, "refined");
  Distribution out = Q[0];
  if (degenerate_shortcut(Q, eps, &out)) {
    finish_report(report, out, oracle, s0);
    return out;
  }
  const double gamma_base = params.gamma > 0.0
                                ? params.gamma
                                : default_gamma_base(Q.size(), eps, delta);
  out = refined_run_impl(Q, oracle, eps, gamma_base, params, report, events);
  finish_report(report, out, oracle, s0);
  return out;
}

bool verify_update_events(const std::vector<UpdateEvent>& events,
                          SampleOracle& oracle, double eps, double delta) {
  if (events.empty()) return true;
  const double e_count = static_cast<double>(events.size());
  const std::size_t m = static_cast<std::size_t>(std::ceil(
      64.0 * (std::log(1.0 / delta) + std::log(e_count)) / (eps * eps)));
  std::vector<std::vector<double>> funcs;
  funcs.reserve(events.size());
  for (const UpdateEvent& ev : events) funcs.push_back(ev.discriminator);
  std::vector<double> est =
      oracle.estimate_expectations(funcs, std::max<std::size_t>(m, 1));
  for (std::size_t k = 0; k < events.size(); ++k) {
    const double slack =
        std::pow(2.0, -static_cast<double>(events[k].j) - 3.0);
    if (!(est[k] - events[k].eq_expectation >
          events[k].v_value - slack)) {
      return false;
    }
  }
  return true;
}

Distribution tiny_error_select(const HypothesisClass& Q, SampleOracle& oracle,
                               double eps, double delta,
                               const RefinedParams& params, RunReport* report) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("tiny_error_select: eps must be > 0");
  }
  params.validate();
  const std::uint64_t s0 = oracle.samples_drawn();
  reset_report(report, "tiny");
  Distribution out = Q[0];
  if (degenerate_shortcut(Q, eps, &out)) {
    finish_report(report, out, oracle, s0);
    return out;
  }
  const std::size_t n = Q.size();
  const double n3 = std::pow(static_cast<double>(n), 3.0);
  const double delta_run = eps * eps / n3;
  const double gamma_base = params.gamma > 0.0
                                ? params.gamma
                                : default_gamma_base(n, eps, delta_run);

  std::size_t restarts = 0;
  while (true) {
    std::vector<UpdateEvent> events;
    RunReport inner;
    out = refined_run_impl(Q, oracle, eps, gamma_base, params, &inner, &events);
    if (report) {
      report->rounds += inner.rounds;
      report->d_schedule = inner.d_schedule;
      report->slice_js = inner.slice_js;
      report->steps = std::move(inner.steps);
    }
    if (verify_update_events(events, oracle, eps, delta)) break;
    if (++restarts > params.restart_cap) {
      throw std::runtime_error(
          "tiny_error_select: verification failed beyond the restart cap");
    }
  }
  if (report) report->restarts = restarts;
  finish_report(report, out, oracle, s0);
  return out;
}

Distribution select(const HypothesisClass& Q, SampleOracle& oracle, double eps,
                    double delta, const RefinedParams& params,
                    RunReport* report) {
  if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("select: need eps > 0 and delta in (0,1)");
  }
  Distribution out = Q[0];
  if (degenerate_shortcut(Q, eps, &out)) {
    if (report) {
      reset_report(report, "select");
      report->output_probs = out.probs();
    }
    return out;
  }
  const double n3 = std::pow(static_cast<double>(Q.size()), 3.0);
  if (delta >= eps * eps / n3) {
    return refined_primal_run(Q, oracle, eps, delta, params, report);
  }
  return tiny_error_select(Q, oracle, eps, delta, params, report);
}

}  // namespace hypsel
