#include "hypsel/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypsel {

SampleOracle::SampleOracle(Distribution target, std::uint64_t seed,
                           OracleMode mode)
    : target_(std::move(target)), seed_(seed), mode_(mode), rng_(seed) {
  if (mode_ == OracleMode::sampled) build_alias_table();
}

SampleOracle SampleOracle::make_sampled(Distribution target,
                                        std::uint64_t seed) {
  return SampleOracle(std::move(target), seed, OracleMode::sampled);
}

SampleOracle SampleOracle::make_exact(Distribution target) {
  return SampleOracle(std::move(target), 0, OracleMode::exact);
}

void SampleOracle::build_alias_table() {
  // Walker alias method with deterministic worklists.
  const std::size_t d = target_.size();
  alias_prob_.assign(d, 0.0);
  alias_idx_.assign(d, 0);
  std::vector<double> scaled(d);
  for (std::size_t x = 0; x < d; ++x) scaled[x] = target_[x] * d;
  std::vector<std::size_t> small, large;
  for (std::size_t x = d; x-- > 0;) {
    (scaled[x] < 1.0 ? small : large).push_back(x);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    alias_prob_[s] = scaled[s];
    alias_idx_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t s : small) alias_prob_[s] = 1.0;
  for (std::size_t l : large) alias_prob_[l] = 1.0;
}

std::size_t SampleOracle::draw_one() {
  const std::size_t d = target_.size();
  const std::size_t bucket = static_cast<std::size_t>(rng_.next_below(d));
  const double u = rng_.next_double();
  return u < alias_prob_[bucket] ? bucket : alias_idx_[bucket];
}

std::vector<std::size_t> SampleOracle::draw(std::size_t m) {
  if (mode_ != OracleMode::sampled) {
    throw std::runtime_error("SampleOracle::draw: oracle is in exact mode");
  }
  std::vector<std::size_t> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = draw_one();
  samples_drawn_ += m;
  return out;
}

std::vector<double> SampleOracle::estimate_expectations(
    const std::vector<std::vector<double>>& functions, std::size_t m) {
  const std::size_t d = target_.size();
  std::vector<double> out(functions.size(), 0.0);
  if (mode_ == OracleMode::exact) {
    for (std::size_t k = 0; k < functions.size(); ++k) {
      double acc = 0.0;
      for (std::size_t x = 0; x < d; ++x) acc += functions[k][x] * target_[x];
      out[k] = acc;
    }
    exact_queries_ += functions.size();
    return out;
  }
  if (m == 0) {
    throw std::invalid_argument("estimate_expectations: m must be >= 1");
  }
  // One shared fresh batch, histogrammed so the cost is m + |X|*|functions|.
  std::vector<double> counts(d, 0.0);
  for (std::size_t k = 0; k < m; ++k) counts[draw_one()] += 1.0;
  samples_drawn_ += m;
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < functions.size(); ++k) {
    double acc = 0.0;
    for (std::size_t x = 0; x < d; ++x) acc += functions[k][x] * counts[x];
    out[k] = acc * inv;
  }
  return out;
}

std::size_t progress_sample_size(std::size_t n, double alpha, double beta) {
  const double m =
      8.0 * (std::log(static_cast<double>(n)) + std::log(2.0 / beta)) /
      (alpha * alpha);
  return static_cast<std::size_t>(std::ceil(m));
}

ProgressOutput progress_step(const DistanceVector& u, const TestDirection& h,
                             double alpha, double beta, SampleOracle& oracle,
                             const HypothesisClass& Q, SupportCache* cache) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("progress_step: alpha, beta must lie in (0,1)");
  }
  if (u.size() != Q.size()) {
    throw std::invalid_argument("progress_step: dimension mismatch");
  }
  (void)u;  // the caller folds z into its state; z itself does not depend on u

  GameValueResult sm = support_min(h, Q, 1.0);
  if (cache) {
    cache->add(distance_vector(sm.witness, Q).values, sm.witness.probs());
  }
  const std::size_t n = Q.size();
  const std::size_t m = progress_sample_size(n, alpha, beta);
  std::vector<double> est = oracle.estimate_expectations(sm.discriminators, m);

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double eq = 0.0;
    for (std::size_t x = 0; x < Q.domain_size(); ++x) {
      eq += sm.discriminators[i][x] * Q[i][x];
    }
    z[i] = std::clamp(est[i] - eq - 0.5 * alpha, 0.0, 1.0);
  }
  ProgressOutput out;
  out.z = DistanceVector(std::move(z));
  out.used_samples = oracle.mode() == OracleMode::sampled ? m : 0;
  out.discriminators = std::move(sm.discriminators);
  return out;
}

}  // namespace hypsel
