// Command line front end: run one selector, simulate the cutting game, sweep
// an experiment grid to CSV, or run the invariant checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hypsel/games.hpp"
#include "hypsel/harness.hpp"
#include "hypsel/selectors.hpp"

namespace {

using namespace hypsel;

int cmd_select(const std::string& config_path, std::uint64_t seed,
               std::size_t n, std::size_t domain_size,
               const std::string& kind, const std::string& algo, double eps,
               double delta, const std::string& mode,
               const std::string& out_path) {
  Instance inst = config_path.empty()
                      ? generate_instance(seed, n, domain_size,
                                          instance_kind_from_string(kind))
                      : load_instance(config_path);
  SampleOracle oracle = mode == "exact"
                            ? SampleOracle::make_exact(inst.target)
                            : SampleOracle::make_sampled(inst.target, seed);
  RunReport report;
  Distribution out = inst.Q[0];
  RefinedParams params;
  if (algo == "yatracos") {
    out = yatracos_select(inst.Q, oracle, eps, delta, &report);
  } else if (algo == "basic") {
    out = basic_select(inst.Q, oracle, eps, delta, &report);
  } else if (algo == "refined") {
    out = refined_primal_run(inst.Q, oracle, eps, delta, params, &report);
  } else if (algo == "tiny") {
    out = tiny_error_select(inst.Q, oracle, eps, delta, params, &report);
  } else if (algo == "select") {
    out = select(inst.Q, oracle, eps, delta, params, &report);
  } else {
    std::cerr << "unknown --algo " << algo << "\n";
    return 2;
  }

  const double tv_out = tv_distance(out, inst.target);
  const double opt = brute_force_opt(inst.target, inst.Q);
  std::printf("algorithm:    %s\n", report.algorithm.c_str());
  std::printf("samples_used: %llu\n",
              static_cast<unsigned long long>(oracle.samples_drawn()));
  std::printf("rounds:       %zu\n", report.rounds);
  std::printf("tv_out:       %.12g\n", tv_out);
  std::printf("opt:          %.12g\n", opt);
  std::printf("bound_2opt:   %.12g\n", 2.0 * opt + eps);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << "output";
    for (double p : out.probs()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %.17e", p);
      f << buf;
    }
    f << "\n";
    std::printf("output written to %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_game(std::size_t n, double eps, const std::string& player_name,
             const std::string& adversary_name, std::uint64_t seed,
             std::size_t max_rounds, const std::string& out_path) {
  DualPlayer player;
  if (player_name == "max-entropy") {
    player = max_entropy_dual_player();
  } else if (player_name == "arbitrary") {
    player = arbitrary_test_player;
  } else {
    std::cerr << "unknown --player " << player_name << "\n";
    return 2;
  }
  DualAdversary adversary;
  if (adversary_name == "greedy-diameter") {
    adversary = greedy_diameter_adversary();
  } else if (adversary_name == "random-direction") {
    adversary = random_direction_adversary(seed);
  } else if (adversary_name == "primal-induced") {
    Instance inst =
        generate_instance(seed, n, 2 * n, InstanceKind::random_dirichlet);
    adversary = primal_induced_adversary(inst.Q, inst.target, 4.0 * eps);
  } else {
    std::cerr << "unknown --adversary " << adversary_name << "\n";
    return 2;
  }

  DualTranscript t = run_dual_game(n, eps, player, adversary, max_rounds);
  std::printf("rounds: %zu (bound %zu)\n", t.rounds, dual_round_bound(n, eps));
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << serialize_transcript(t);
    std::printf("transcript written to %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_path) {
  ExperimentConfig config = load_config(config_path);
  std::vector<TrialRecord> records = run_experiment(config);
  if (out_path.empty()) {
    std::fputs(records_to_csv(records).c_str(), stdout);
  } else {
    write_csv_file(out_path, records);
    std::size_t ok = 0;
    for (const auto& r : records) ok += r.guarantee_ok ? 1 : 0;
    std::printf("%zu/%zu guarantees met; CSV written to %s\n", ok,
                records.size(), out_path.c_str());
  }
  return 0;
}

int cmd_check(std::uint64_t seed, std::size_t trials) {
  CheckReport rep = run_invariant_checks(seed, trials);
  std::printf("invariant checks: %zu passed, %zu failed\n", rep.passed,
              rep.failed);
  for (const std::string& f : rep.failures) {
    std::printf("  FAIL %s\n", f.c_str());
  }
  return rep.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agnostic hypothesis selection over finite domains"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double eps = 0.1, delta = 0.1;
  std::string algo = "select", mode = "sampled", out_path, config_path;

  auto* sel = app.add_subcommand("select", "run one selector on one instance");
  std::size_t n = 4, domain_size = 8;
  std::string kind = "random-dirichlet";
  sel->add_option("--seed", seed);
  sel->add_option("--eps", eps);
  sel->add_option("--delta", delta);
  sel->add_option("--algo", algo)
      ->check(CLI::IsMember({"yatracos", "basic", "refined", "tiny", "select"}));
  sel->add_option("--mode", mode)->check(CLI::IsMember({"sampled", "exact"}));
  sel->add_option("--out", out_path);
  sel->add_option("--config", config_path, "instance JSON file");
  sel->add_option("--n", n);
  sel->add_option("--domain-size", domain_size);
  sel->add_option("--kind", kind);

  auto* game = app.add_subcommand("game", "simulate the cutting game");
  std::size_t game_n = 8, max_rounds = 100000;
  std::string player = "max-entropy", adversary = "greedy-diameter";
  game->add_option("--n", game_n);
  game->add_option("--eps", eps);
  game->add_option("--seed", seed);
  game->add_option("--player", player);
  game->add_option("--adversary", adversary);
  game->add_option("--max-rounds", max_rounds);
  game->add_option("--out", out_path);

  auto* bench = app.add_subcommand("bench", "run an experiment grid to CSV");
  bench->add_option("--config", config_path, "experiment JSON file")
      ->required();
  bench->add_option("--out", out_path);

  auto* check = app.add_subcommand("check", "invariant suite over random instances");
  std::size_t check_trials = 20;
  check->add_option("--seed", seed);
  check->add_option("--trials", check_trials);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sel->parsed()) {
      return cmd_select(config_path, seed, n, domain_size, kind, algo, eps,
                        delta, mode, out_path);
    }
    if (game->parsed()) {
      return cmd_game(game_n, eps, player, adversary, seed, max_rounds,
                      out_path);
    }
    if (bench->parsed()) return cmd_bench(config_path, out_path);
    if (check->parsed()) return cmd_check(seed, check_trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
