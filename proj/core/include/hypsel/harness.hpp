#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hypsel/distribution.hpp"
#include "hypsel/sampling.hpp"
#include "hypsel/selectors.hpp"

namespace hypsel {

enum class InstanceKind { random_dirichlet, adversarial_corners, near_realizable };

InstanceKind instance_kind_from_string(const std::string& s);
std::string to_string(InstanceKind kind);

struct Instance {
  HypothesisClass Q;
  Distribution target;
};

/// Deterministic per seed. "near-realizable" places the target within TV
/// 0.05 of one hypothesis; "adversarial-corners" uses near-point masses.
Instance generate_instance(std::uint64_t seed, std::size_t n,
                           std::size_t domain_size, InstanceKind kind);

/// Exact minimum TV distance from p to the class; the oracle behind every
/// guarantee check.
double brute_force_opt(const Distribution& p, const HypothesisClass& Q);

struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  std::size_t n = 4;
  std::size_t domain_size = 8;
  double eps = 0.1;
  double delta = 0.1;
  std::vector<std::string> algorithms = {"select"};
  std::size_t trials = 1;
  InstanceKind instance_kind = InstanceKind::random_dirichlet;
  RefinedParams params;
  OracleMode oracle_mode = OracleMode::sampled;
  bool record_wall_time = true;  // off = zeroed column, byte-stable output
  std::size_t threads = 0;       // 0 picks the hardware count

  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::string algorithm;
  std::size_t n = 0;
  std::size_t domain_size = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::uint64_t samples_used = 0;
  std::size_t rounds = 0;
  double tv_out = 0.0;
  double opt = 0.0;
  bool guarantee_ok = false;
  std::string status = "ok";
  std::int64_t wall_time_ms = 0;
};

/// Runs every algorithm on every trial instance (concurrently, one oracle per
/// task); per-trial failures land in the status column and the run continues.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

/// CSV with the fixed header
/// trial,algorithm,n,domain_size,eps,delta,samples_used,rounds,tv_out,opt,guarantee_ok,status,wall_time_ms
std::string records_to_csv(const std::vector<TrialRecord>& records);
void write_csv_file(const std::string& path,
                    const std::vector<TrialRecord>& records);

/// Instance files: JSON with fields domain_size, hypotheses, target;
/// probabilities printed in full precision scientific notation.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
void save_instance(const std::string& path, const Instance& instance);
Instance load_instance(const std::string& path);

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Invariant battery over random instances (the `check` subcommand).
struct CheckReport {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;
};
CheckReport run_invariant_checks(std::uint64_t seed, std::size_t trials);

}  // namespace hypsel
