#include "hypsel/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hypsel/entropy_player.hpp"
#include "hypsel/rng.hpp"
#include "hypsel/tv_geometry.hpp"

namespace hypsel {

namespace {

std::vector<double> dirichlet_row(SplitMix64& rng, std::size_t d) {
  std::vector<double> v(d);
  double sum = 0.0;
  for (std::size_t x = 0; x < d; ++x) {
    // Exponential spacing gives a flat Dirichlet after normalization.
    v[x] = -std::log(1.0 - rng.next_double());
    sum += v[x];
  }
  for (double& p : v) p /= sum;
  return v;
}

std::vector<double> mix(const std::vector<double>& a,
                        const std::vector<double>& b, double wa) {
  std::vector<double> out(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) {
    out[x] = wa * a[x] + (1.0 - wa) * b[x];
  }
  return out;
}

}  // namespace

InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "random-dirichlet") return InstanceKind::random_dirichlet;
  if (s == "adversarial-corners") return InstanceKind::adversarial_corners;
  if (s == "near-realizable") return InstanceKind::near_realizable;
  throw std::invalid_argument("unknown instance kind: " + s);
}

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::random_dirichlet: return "random-dirichlet";
    case InstanceKind::adversarial_corners: return "adversarial-corners";
    case InstanceKind::near_realizable: return "near-realizable";
  }
  return "?";
}

Instance generate_instance(std::uint64_t seed, std::size_t n,
                           std::size_t domain_size, InstanceKind kind) {
  if (n < 1 || domain_size < 2) {
    throw std::invalid_argument(
        "generate_instance: need n >= 1 and domain_size >= 2");
  }
  SplitMix64 rng = SplitMix64::derive(seed, 0x9ce5);
  std::vector<Distribution> hyps;
  hyps.reserve(n);
  switch (kind) {
    case InstanceKind::random_dirichlet: {
      for (std::size_t i = 0; i < n; ++i) {
        hyps.emplace_back(dirichlet_row(rng, domain_size));
      }
      return Instance{HypothesisClass(std::move(hyps)),
                      Distribution(dirichlet_row(rng, domain_size))};
    }
    case InstanceKind::adversarial_corners: {
      const std::vector<double> unif(domain_size, 1.0 / domain_size);
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> corner(domain_size, 0.0);
        corner[i % domain_size] = 1.0;
        hyps.emplace_back(mix(corner, unif, 0.95));
      }
      return Instance{HypothesisClass(std::move(hyps)),
                      Distribution(dirichlet_row(rng, domain_size))};
    }
    case InstanceKind::near_realizable: {
      for (std::size_t i = 0; i < n; ++i) {
        hyps.emplace_back(dirichlet_row(rng, domain_size));
      }
      const std::size_t pick = static_cast<std::size_t>(rng.next_below(n));
      std::vector<double> noise = dirichlet_row(rng, domain_size);
      std::vector<double> target = mix(hyps[pick].probs(), noise, 0.95);
      return Instance{HypothesisClass(std::move(hyps)),
                      Distribution(std::move(target))};
    }
  }
  throw std::logic_error("generate_instance: unreachable");
}

double brute_force_opt(const Distribution& p, const HypothesisClass& Q) {
  return opt_index(p, Q).second;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("config: eps must lie in (0,1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("config: delta must lie in (0,1)");
  }
  if (algorithms.empty()) {
    throw std::invalid_argument("config: no algorithms listed");
  }
}

namespace {

struct AlgorithmRun {
  Distribution output;
  RunReport report;
};

AlgorithmRun dispatch_algorithm(const std::string& name,
                                const HypothesisClass& Q, SampleOracle& oracle,
                                double eps, double delta,
                                const RefinedParams& params) {
  AlgorithmRun run{Q[0], {}};
  if (name == "yatracos") {
    run.output = yatracos_select(Q, oracle, eps, delta, &run.report);
  } else if (name == "basic") {
    run.output = basic_select(Q, oracle, eps, delta, &run.report);
  } else if (name == "refined") {
    run.output = refined_primal_run(Q, oracle, eps, delta, params, &run.report);
  } else if (name == "tiny") {
    run.output = tiny_error_select(Q, oracle, eps, delta, params, &run.report);
  } else if (name == "select") {
    run.output = select(Q, oracle, eps, delta, params, &run.report);
  } else {
    throw std::invalid_argument("unknown algorithm: " + name);
  }
  return run;
}

double guarantee_factor(const std::string& name) {
  return name == "yatracos" ? 3.0 : 2.0;
}

std::string sanitize_status(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_algos = config.algorithms.size();
  const std::size_t n_tasks = config.trials * n_algos;
  std::vector<TrialRecord> records(n_tasks);

  auto run_task = [&](std::size_t task) {
    const std::size_t trial = task / n_algos;
    const std::size_t algo_idx = task % n_algos;
    const std::string& algo = config.algorithms[algo_idx];

    TrialRecord rec;
    rec.trial = trial;
    rec.algorithm = algo;
    rec.n = config.n;
    rec.domain_size = config.domain_size;
    rec.eps = config.eps;
    rec.delta = config.delta;

    const auto t0 = std::chrono::steady_clock::now();
    try {
      const std::uint64_t instance_seed =
          SplitMix64::derive(config.master_seed, trial).next_u64();
      Instance inst = generate_instance(instance_seed, config.n,
                                        config.domain_size,
                                        config.instance_kind);
      const std::uint64_t oracle_seed =
          SplitMix64::derive(config.master_seed, trial * 257 + algo_idx + 1)
              .next_u64();
      SampleOracle oracle =
          config.oracle_mode == OracleMode::sampled
              ? SampleOracle::make_sampled(inst.target, oracle_seed)
              : SampleOracle::make_exact(inst.target);

      AlgorithmRun run = dispatch_algorithm(algo, inst.Q, oracle, config.eps,
                                            config.delta, config.params);
      rec.samples_used = oracle.samples_drawn();
      rec.rounds = run.report.rounds;
      rec.tv_out = tv_distance(run.output, inst.target);  // exact, never estimated
      rec.opt = brute_force_opt(inst.target, inst.Q);
      rec.guarantee_ok =
          rec.tv_out <= guarantee_factor(algo) * rec.opt + config.eps + 1e-6;
    } catch (const std::exception& e) {
      rec.status = sanitize_status(std::string("error: ") + e.what());
      rec.guarantee_ok = false;
    }
    if (config.record_wall_time) {
      rec.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    }
    records[task] = std::move(rec);
  };

  std::size_t workers = config.threads > 0
                            ? config.threads
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t t = next.fetch_add(1); t < n_tasks;
             t = next.fetch_add(1)) {
          run_task(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "trial,algorithm,n,domain_size,eps,delta,samples_used,rounds,tv_out,opt,"
      "guarantee_ok,status,wall_time_ms\n";
  char buf[512];
  for (const TrialRecord& r : records) {
    std::snprintf(buf, sizeof buf,
                  "%zu,%s,%zu,%zu,%.12g,%.12g,%llu,%zu,%.12g,%.12g,%d,%s,%lld\n",
                  r.trial, r.algorithm.c_str(), r.n, r.domain_size, r.eps,
                  r.delta, static_cast<unsigned long long>(r.samples_used),
                  r.rounds, r.tv_out, r.opt, r.guarantee_ok ? 1 : 0,
                  r.status.c_str(), static_cast<long long>(r.wall_time_ms));
    out += buf;
  }
  return out;
}

void write_csv_file(const std::string& path,
                    const std::vector<TrialRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << records_to_csv(records);
}

std::string instance_to_json(const Instance& instance) {
  // Hand-rolled writer: scientific notation with 17 significant digits makes
  // the files bit-exact on reload and human-auditable.
  char buf[64];
  std::string out = "{\n  \"domain_size\": ";
  out += std::to_string(instance.Q.domain_size());
  out += ",\n  \"hypotheses\": [\n";
  for (std::size_t i = 0; i < instance.Q.size(); ++i) {
    out += "    [";
    for (std::size_t x = 0; x < instance.Q.domain_size(); ++x) {
      std::snprintf(buf, sizeof buf, "%.17e", instance.Q[i][x]);
      out += buf;
      if (x + 1 < instance.Q.domain_size()) out += ", ";
    }
    out += i + 1 < instance.Q.size() ? "],\n" : "]\n";
  }
  out += "  ],\n  \"target\": [";
  for (std::size_t x = 0; x < instance.target.size(); ++x) {
    std::snprintf(buf, sizeof buf, "%.17e", instance.target[x]);
    out += buf;
    if (x + 1 < instance.target.size()) out += ", ";
  }
  out += "]\n}\n";
  return out;
}

Instance instance_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const std::size_t d = j.at("domain_size").get<std::size_t>();
  std::vector<Distribution> hyps;
  for (const auto& row : j.at("hypotheses")) {
    std::vector<double> v = row.get<std::vector<double>>();
    if (v.size() != d) {
      throw std::invalid_argument("instance file: row length != domain_size");
    }
    hyps.emplace_back(std::move(v));
  }
  std::vector<double> t = j.at("target").get<std::vector<double>>();
  if (t.size() != d) {
    throw std::invalid_argument("instance file: target length != domain_size");
  }
  return Instance{HypothesisClass(std::move(hyps)),
                  Distribution(std::move(t))};
}

void save_instance(const std::string& path, const Instance& instance) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << instance_to_json(instance);
}

Instance load_instance(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return instance_from_json(ss.str());
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("n")) c.n = j["n"].get<std::size_t>();
  if (j.contains("domain_size")) c.domain_size = j["domain_size"].get<std::size_t>();
  if (j.contains("eps")) c.eps = j["eps"].get<double>();
  if (j.contains("delta")) c.delta = j["delta"].get<double>();
  if (j.contains("algorithms")) {
    c.algorithms = j["algorithms"].get<std::vector<std::string>>();
  }
  if (j.contains("trials")) c.trials = j["trials"].get<std::size_t>();
  if (j.contains("instance_kind")) {
    c.instance_kind = instance_kind_from_string(j["instance_kind"].get<std::string>());
  }
  if (j.contains("oracle_mode")) {
    const std::string m = j["oracle_mode"].get<std::string>();
    if (m == "sampled") {
      c.oracle_mode = OracleMode::sampled;
    } else if (m == "exact") {
      c.oracle_mode = OracleMode::exact;
    } else {
      throw std::invalid_argument("config: oracle_mode must be sampled|exact");
    }
  }
  if (j.contains("record_wall_time")) {
    c.record_wall_time = j["record_wall_time"].get<bool>();
  }
  if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (p.contains("C0")) c.params.C0 = p["C0"].get<double>();
    if (p.contains("C1")) c.params.C1 = p["C1"].get<double>();
    if (p.contains("C2")) c.params.C2 = p["C2"].get<double>();
    if (p.contains("gamma")) c.params.gamma = p["gamma"].get<double>();
    if (p.contains("restart_cap")) {
      c.params.restart_cap = p["restart_cap"].get<std::size_t>();
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

namespace {

void check(CheckReport& rep, bool ok, const std::string& name) {
  if (ok) {
    ++rep.passed;
  } else {
    ++rep.failed;
    rep.failures.push_back(name);
  }
}

}  // namespace

CheckReport run_invariant_checks(std::uint64_t seed, std::size_t trials) {
  CheckReport rep;
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::derive(seed, t);
    const std::size_t n = 2 + rng.next_below(5);
    const std::size_t d = 2 + rng.next_below(9);
    Instance inst = generate_instance(rng.next_u64(), n, d,
                                      InstanceKind::random_dirichlet);
    const std::string tag = " (trial " + std::to_string(t) + ")";

    // Metric and convexity of the distance map.
    {
      Instance other = generate_instance(rng.next_u64(), n, d,
                                         InstanceKind::random_dirichlet);
      const Distribution &a = inst.target, &b = other.target;
      check(rep, std::fabs(tv_distance(a, b) - tv_distance(b, a)) < 1e-12,
            "tv symmetry" + tag);
      bool tri = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (tv_distance(a, b) >
            tv_distance(a, inst.Q[i]) + tv_distance(inst.Q[i], b) + 1e-9) {
          tri = false;
        }
      }
      check(rep, tri, "tv triangle" + tag);

      const double lam = rng.next_double();
      std::vector<double> mixv(d);
      for (std::size_t x = 0; x < d; ++x) {
        mixv[x] = lam * a[x] + (1.0 - lam) * b[x];
      }
      Distribution mixd{std::move(mixv)};
      bool convex = true;
      for (std::size_t i = 0; i < n; ++i) {
        const double lhs = tv_distance(mixd, inst.Q[i]);
        const double rhs = lam * tv_distance(a, inst.Q[i]) +
                           (1.0 - lam) * tv_distance(b, inst.Q[i]);
        if (lhs > rhs + 1e-9) convex = false;
      }
      check(rep, convex, "tv convexity" + tag);
    }

    // Pinsker and the entropy/KL identity.
    {
      std::vector<double> wa(n), wb(n);
      double sa = 0.0, sb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        wa[i] = 0.05 + rng.next_double();
        wb[i] = 0.05 + rng.next_double();
        sa += wa[i];
        sb += wb[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        wa[i] /= sa;
        wb[i] /= sb;
      }
      TestDirection ha(wa), hb(wb);
      const double kl = kl_divergence(ha, hb);
      const double l1 = l1_distance(wa, wb);
      check(rep, kl >= 0.5 * l1 * l1 - 1e-9, "pinsker" + tag);
      const double lhs = entropy(ha);
      const double rhs = std::log(static_cast<double>(n)) -
                         kl_divergence(ha, TestDirection::uniform(n));
      check(rep, std::fabs(lhs - rhs) < 1e-9, "entropy-kl identity" + tag);
    }

    // Violated-test value against the target's own profile.
    {
      SupportCache cache;
      DistanceVector vp = distance_vector(inst.target, inst.Q);
      ViolatedTestResult vt = violated_test_value(
          MarginQuery(vp, 0.0), inst.Q, 1e-9, &cache);
      check(rep, vt.value <= 1e-9, "profile feasibility" + tag);

      // Progress contract under an exact oracle.
      SampleOracle oracle = SampleOracle::make_exact(inst.target);
      std::vector<double> hw(n);
      double hs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        hw[i] = 0.02 + rng.next_double();
        hs += hw[i];
      }
      for (double& w : hw) w /= hs;
      TestDirection h(hw);
      const double alpha = 0.05 + 0.2 * rng.next_double();
      ProgressOutput po = progress_step(DistanceVector::zeros(n), h, alpha,
                                        0.1, oracle, inst.Q, &cache);
      bool below = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (po.z[i] > vp[i] + 1e-12) below = false;
      }
      check(rep, below, "progress below profile" + tag);
      GameValueResult sm = support_min(h, inst.Q, 1.0);
      double hz = 0.0;
      for (std::size_t i = 0; i < n; ++i) hz += h[i] * po.z[i];
      check(rep, hz >= sm.value - alpha - 1e-12, "progress value" + tag);
    }
  }
  return rep;
}

}  // namespace hypsel
