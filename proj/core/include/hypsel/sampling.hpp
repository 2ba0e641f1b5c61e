#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hypsel/distribution.hpp"
#include "hypsel/rng.hpp"
#include "hypsel/tv_geometry.hpp"

namespace hypsel {

enum class OracleMode { sampled, exact };

/// Sample access to a hidden target distribution. In sampled mode every
/// batch comes from the seeded generator and is counted; in exact mode
/// expectation queries return true values and are tallied separately.
/// Single consumer: one oracle per trial.
class SampleOracle {
 public:
  static SampleOracle make_sampled(Distribution target, std::uint64_t seed);
  static SampleOracle make_exact(Distribution target);

  OracleMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t samples_drawn() const { return samples_drawn_; }
  std::uint64_t exact_queries() const { return exact_queries_; }
  std::size_t domain_size() const { return target_.size(); }

  /// The hidden target; for reporting and exact-mode evaluation only,
  /// selectors must touch it through draws and expectation queries.
  const Distribution& target() const { return target_; }

  /// m i.i.d. draws; throws in exact mode.
  std::vector<std::size_t> draw(std::size_t m);

  /// Evaluate every function (given as per-element values in [0,1]) on one
  /// fresh batch of m samples. Exact mode returns true expectations.
  std::vector<double> estimate_expectations(
      const std::vector<std::vector<double>>& functions, std::size_t m);

 private:
  SampleOracle(Distribution target, std::uint64_t seed, OracleMode mode);
  void build_alias_table();
  std::size_t draw_one();

  Distribution target_;
  std::uint64_t seed_ = 0;
  OracleMode mode_ = OracleMode::exact;
  SplitMix64 rng_;
  std::uint64_t samples_drawn_ = 0;
  std::uint64_t exact_queries_ = 0;
  std::vector<double> alias_prob_;
  std::vector<std::size_t> alias_idx_;
};

/// Result of one statistical-query progress step.
struct ProgressOutput {
  DistanceVector z;
  std::uint64_t used_samples = 0;
  std::vector<std::vector<double>> discriminators;
};

/// One round of the distance-vector update: computes the discriminators for
/// h, estimates their expectations on a fresh batch of
/// m = ceil(8 (ln n + ln(2/beta)) / alpha^2) samples, and shifts down by
/// alpha/2 so that z stays below the true distance profile (surely in exact
/// mode, with probability >= 1-beta in sampled mode) while
/// h.z >= support_min(h).value - alpha.
ProgressOutput progress_step(const DistanceVector& u, const TestDirection& h,
                             double alpha, double beta, SampleOracle& oracle,
                             const HypothesisClass& Q,
                             SupportCache* cache = nullptr);

/// The batch-size rule used by progress_step.
std::size_t progress_sample_size(std::size_t n, double alpha, double beta);

}  // namespace hypsel
