#include <algorithm>

#include <benchmark/benchmark.h>

#include "memchan/attenuation.hpp"
#include "memchan/channels.hpp"
#include "memchan/rates.hpp"

using namespace memchan;

namespace {

void BM_ComposeSequence(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto env = qubit_dephasing_environment(0.3);
  const CarrierSequence s{{0.4}, true};
  for (auto _ : state) benchmark::DoNotOptimize(compose_sequence(env, s, n));
}
BENCHMARK(BM_ComposeSequence)->DenseRange(1, 6);

void BM_GbarClosedForm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_solution(0.3, 0.2, 0.6, n));
}
BENCHMARK(BM_GbarClosedForm)->Arg(1)->Arg(10)->Arg(50);

void BM_GbarIterated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(iterated_gbar(0.3, 0.2, 0.6, n));
}
BENCHMARK(BM_GbarIterated)->Arg(1)->Arg(10)->Arg(50);

void BM_OneShotQLower(benchmark::State& state) {
  const auto channel = compose_sequence(qubit_dephasing_environment(0.4), CarrierSequence{{1.0}, false}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(one_shot_q_lower(channel));
}
BENCHMARK(BM_OneShotQLower);

// The full grid behind the Gamma figure: 10 n values x 50 tau points.
void BM_GammaSweep(benchmark::State& state) {
  for (auto _ : state) {
    double best = 0.0;
    for (int n = 1; n <= 10; ++n)
      for (int i = 1; i <= 50; ++i) best = std::max(best, gamma_ratio(0.01, n, i / 50.0));
    benchmark::DoNotOptimize(best);
  }
}
BENCHMARK(BM_GammaSweep)->Unit(benchmark::kMillisecond);

void BM_BestRateSearch(benchmark::State& state) {
  const auto env = qubit_dephasing_environment(0.25);
  RateSearchOptions options;
  options.max_group = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(best_rate_search(0.01, env, 10, options));
}
BENCHMARK(BM_BestRateSearch)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
