// Microbenchmarks for the numeric cores: the exact support minimization, the
// cutting-plane violated-test solve (cold and warm), the constrained entropy
// maximizer, and oracle sampling throughput.

#include <benchmark/benchmark.h>

#include "hypsel/entropy_player.hpp"
#include "hypsel/harness.hpp"
#include "hypsel/sampling.hpp"
#include "hypsel/selectors.hpp"
#include "hypsel/tv_geometry.hpp"

namespace {

using namespace hypsel;

Instance bench_instance(std::size_t n, std::size_t d) {
  return generate_instance(12345, n, d, InstanceKind::random_dirichlet);
}

void BM_support_min(benchmark::State& state) {
  const std::size_t n = state.range(0), d = state.range(1);
  Instance inst = bench_instance(n, d);
  TestDirection h = TestDirection::uniform(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(support_min(h, inst.Q, 1.0));
  }
}
BENCHMARK(BM_support_min)->Args({4, 8})->Args({16, 16})->Args({64, 32});

void BM_violated_test_cold(benchmark::State& state) {
  const std::size_t n = state.range(0), d = state.range(1);
  Instance inst = bench_instance(n, d);
  MarginQuery q(DistanceVector::zeros(n), 0.0);
  for (auto _ : state) {
    SupportCache cache;
    benchmark::DoNotOptimize(violated_test_value(q, inst.Q, 1e-9, &cache));
  }
}
BENCHMARK(BM_violated_test_cold)->Args({4, 8})->Args({16, 16})->Args({64, 32});

void BM_violated_test_warm(benchmark::State& state) {
  const std::size_t n = state.range(0), d = state.range(1);
  Instance inst = bench_instance(n, d);
  MarginQuery q(DistanceVector::zeros(n), 0.0);
  SupportCache cache;
  violated_test_value(q, inst.Q, 1e-9, &cache);
  for (auto _ : state) {
    benchmark::DoNotOptimize(violated_test_value(q, inst.Q, 1e-9, &cache));
  }
}
BENCHMARK(BM_violated_test_warm)->Args({4, 8})->Args({16, 16})->Args({64, 32});

void BM_max_entropy_test(benchmark::State& state) {
  const std::size_t n = state.range(0), d = state.range(1);
  Instance inst = bench_instance(n, d);
  SupportCache cache;
  ViolatedTestResult vt = violated_test_value(
      MarginQuery(DistanceVector::zeros(n), 0.0), inst.Q, 1e-9, &cache);
  const double eps = 0.5 * vt.value;
  const double tol = 0.1 * vt.value;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        max_entropy_test(DistanceVector::zeros(n), eps, inst.Q, tol, &cache));
  }
}
BENCHMARK(BM_max_entropy_test)->Args({4, 8})->Args({16, 16})->Args({64, 32});

void BM_oracle_draw(benchmark::State& state) {
  Instance inst = bench_instance(4, state.range(0));
  SampleOracle oracle = SampleOracle::make_sampled(inst.target, 7);
  std::vector<std::vector<double>> fns(
      4, std::vector<double>(state.range(0), 0.5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.estimate_expectations(fns, 100000));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_oracle_draw)->Arg(16)->Arg(64);

void BM_basic_select_exact(benchmark::State& state) {
  Instance inst = bench_instance(8, 16);
  for (auto _ : state) {
    SampleOracle oracle = SampleOracle::make_exact(inst.target);
    benchmark::DoNotOptimize(basic_select(inst.Q, oracle, 0.1, 0.1));
  }
}
BENCHMARK(BM_basic_select_exact);

}  // namespace

BENCHMARK_MAIN();
