#include "logmorph/sequences.hpp"
#include "logmorph/templates.hpp"

#include "oracles.hpp"

#include <benchmark/benchmark.h>

using namespace logmorph;

static void BM_Tokenize(benchmark::State& state) {
  const auto corpus = oracle::labeled_corpus(1000, 1);
  for (auto _ : state) {
    std::size_t n = 0;
    for (const auto& e : corpus.events) n += tokenize(e.message).size();
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Tokenize);

static void BM_MineTemplates(benchmark::State& state) {
  const auto corpus = oracle::labeled_corpus(static_cast<std::size_t>(state.range(0)), 2);
  const MinerConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mine_templates(corpus.events, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MineTemplates)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_MinePairs(benchmark::State& state) {
  oracle::Rng rng(3);
  std::vector<std::vector<std::string>> streams(16);
  for (auto& s : streams) {
    for (int i = 0; i < state.range(0) / 16; ++i) {
      s.push_back(std::to_string(oracle::uniform(rng, 1, 200)));
    }
  }
  const auto keyed = KeyStreams::from_text(streams);
  for (auto _ : state) benchmark::DoNotOptimize(mine_pairs(keyed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MinePairs)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
