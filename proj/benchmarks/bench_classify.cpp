#include <benchmark/benchmark.h>

#include "ldknn/classifiers.hpp"
#include "oracles.hpp"

using namespace ldknn;

namespace {

// Args: training size m, dimensions d, kpc.
template <Rule R>
void BM_Classify(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto train = oracle::random_blobs(2, m / 2, d, 1.0, 1);
  const auto queries = oracle::random_blobs(2, 32, d, 1.0, 2);
  DecisionRuleConfig cfg;
  cfg.rule = R;
  cfg.kpc = static_cast<std::size_t>(state.range(2));
  const Classifier c(train, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.classify(queries.row(i++ % queries.size())));
  }
  state.SetItemsProcessed(state.iterations());
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int m : {1000, 4000, 16000}) b->Args({m, 16, 5});
  for (int d : {4, 32, 128}) b->Args({4000, d, 5});
  for (int kpc : {5, 20, 80}) b->Args({4000, 16, kpc});
}

}  // namespace

BENCHMARK(BM_Classify<Rule::ld_gme>)->Apply(sizes);
BENCHMARK(BM_Classify<Rule::ld_kde>)->Apply(sizes);
BENCHMARK(BM_Classify<Rule::v_knn>)->Apply(sizes);
BENCHMARK(BM_Classify<Rule::dw1_knn>)->Apply(sizes);
BENCHMARK(BM_Classify<Rule::cap>)->Apply(sizes);
BENCHMARK(BM_Classify<Rule::nbc_gme>)->Args({4000, 16, 1});

BENCHMARK_MAIN();
