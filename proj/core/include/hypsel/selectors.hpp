#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hypsel/distribution.hpp"
#include "hypsel/sampling.hpp"
#include "hypsel/tv_geometry.hpp"

namespace hypsel {

/// Tunables of the refined selector. Defaults follow the analysis
/// constraints validated in `validate`.
struct RefinedParams {
  double C0 = 256.0;  // scale of the margin decrement d'
  double C1 = 64.0;   // sample-count scale
  double C2 = 33.0;   // slice threshold scale, must exceed 32
  double gamma = 0.0; // per-call failure budget; 0 derives the default
  std::size_t restart_cap = 100;

  void validate() const;
};

/// Outcome of one slice search.
struct SliceResult {
  bool success = false;
  std::size_t j = 0;
  DistanceVector v;
  std::vector<std::vector<double>> discriminators;
  std::uint64_t samples_used = 0;  // sum of the per-slice batch sizes drawn
};

/// One accepted refined step, kept for replay checks.
struct StepRecord {
  double d = 0.0;
  double dprime = 0.0;
  std::size_t j = 0;
  std::vector<double> h;
  std::vector<double> u_before;
  std::vector<double> u_after;
};

/// An update event retained for the tiny-error verification pass.
struct UpdateEvent {
  std::size_t hyp_index = 0;
  std::size_t j = 0;
  double v_value = 0.0;
  double eq_expectation = 0.0;         // E_{q_i}[F_i]
  std::vector<double> discriminator;   // F_i at the time of the update
};

/// Structured run report (the selector external interface).
struct RunReport {
  std::string algorithm;
  std::uint64_t samples_used = 0;
  std::size_t rounds = 0;
  std::size_t restarts = 0;
  std::vector<double> d_schedule;
  std::vector<std::size_t> slice_js;
  std::vector<StepRecord> steps;
  std::vector<double> output_probs;
};

/// Minimum-distance estimate over the pairwise discriminating sets:
/// guarantees TV(out, p) <= 3 opt + eps with probability >= 1 - delta.
Distribution yatracos_select(const HypothesisClass& Q, SampleOracle& oracle,
                             double eps, double delta,
                             RunReport* report = nullptr);

/// Max-entropy test loop at fixed margin: TV(out, p) <= 2 opt + eps
/// (deterministic under an exact oracle, probability >= 1 - delta sampled).
Distribution basic_select(const HypothesisClass& Q, SampleOracle& oracle,
                          double eps, double delta, RunReport* report = nullptr);

/// One adaptive slice search at margin level d with decrement dprime.
SliceResult refined_hypothesis_select(const DistanceVector& u,
                                      const TestDirection& h, double d,
                                      double dprime, double gamma,
                                      const RefinedParams& params,
                                      SampleOracle& oracle,
                                      const HypothesisClass& Q,
                                      SupportCache* cache = nullptr);

/// The refined selector: margin levels shrink by d' = d/(C0 ln(1+1/d)) while
/// inner max-entropy steps clear each level with slice-adaptive sampling.
Distribution refined_primal_run(const HypothesisClass& Q, SampleOracle& oracle,
                                double eps, double delta,
                                const RefinedParams& params,
                                RunReport* report = nullptr,
                                std::vector<UpdateEvent>* events = nullptr);

/// Verification used by the tiny-error wrapper: re-estimates every recorded
/// update on one fresh batch and demands est > v - 2^{-j-3}.
bool verify_update_events(const std::vector<UpdateEvent>& events,
                          SampleOracle& oracle, double eps, double delta);

/// Refined run at confidence eps^2/n^3 plus a fresh-sample verification pass,
/// restarting on failure.
Distribution tiny_error_select(const HypothesisClass& Q, SampleOracle& oracle,
                               double eps, double delta,
                               const RefinedParams& params,
                               RunReport* report = nullptr);

/// Dispatch: refined run when delta >= eps^2/n^3, tiny-error path otherwise.
Distribution select(const HypothesisClass& Q, SampleOracle& oracle, double eps,
                    double delta, const RefinedParams& params = {},
                    RunReport* report = nullptr);

/// Batch size used by yatracos_select.
std::size_t yatracos_sample_size(std::size_t n, double eps, double delta);

/// Slice ladder parameters (exposed for tests).
std::size_t slice_count(double d);                       // j_max
std::size_t slice_sample_size(double d, double gamma, double C1,
                              std::size_t j);            // m_j

}  // namespace hypsel
