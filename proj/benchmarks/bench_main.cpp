#include <benchmark/benchmark.h>

#include <random>

#include "rcr/engine.hpp"
#include "rcr/fieldsim.hpp"
#include "rcr/special.hpp"

namespace {

rcr::Sample random_sample(std::size_t k, std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> data(k * n);
  for (auto& v : data) v = z(rng);
  return rcr::Sample(k, n, std::move(data));
}

void BM_MonteCarloExpectation(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto y = random_sample(k, 100);
  const auto scheme = rcr::WeightScheme::rademacher(100);
  auto cfg = rcr::EngineConfig::monte_carlo(1000, 3);
  cfg.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rcr::resampled_expectation(y, scheme, rcr::Phi::sup_abs(), cfg));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_MonteCarloExpectation)->Arg(16)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_ExactQuantile(benchmark::State& state) {
  const auto y = rcr::center_columns(random_sample(64, 12));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rcr::resampled_quantile(y, rcr::Phi::sup_abs(), 0.05, rcr::EngineConfig::exact()));
  }
}
BENCHMARK(BM_ExactQuantile)->Unit(benchmark::kMillisecond);

void BM_TorusFields(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const rcr::TorusFieldGenerator gen(side, 4.0);
  rcr::Rng rng(5);
  std::vector<double> out(gen.dim() * 100);
  for (auto _ : state) {
    gen.generate(rng, 100, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_TorusFields)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BinomialQuantile(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rcr::binom_upper_quantile(n, 0.00225));
}
BENCHMARK(BM_BinomialQuantile)->Arg(64)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
