#include <benchmark/benchmark.h>

#include <vector>

#include "patrol/generator.hpp"
#include "patrol/harness.hpp"
#include "patrol/linucb.hpp"
#include "patrol/policies.hpp"
#include "patrol/rng.hpp"

using namespace patrol;

namespace {

std::vector<LabeledFeature> random_batch(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledFeature> batch(static_cast<std::size_t>(n));
  for (auto& item : batch) {
    for (auto& v : item.x) v = rng.normal();
    item.label = rng.bernoulli(0.2) ? 1.0 : 0.0;
  }
  return batch;
}

void BM_RidgeFit(benchmark::State& state) {
  LinUcbModel model;
  model.ingest_batch(random_batch(256, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.ridge_fit());
  }
}
BENCHMARK(BM_RidgeFit);

void BM_UcbScore(benchmark::State& state) {
  LinUcbModel model;
  model.ingest_batch(random_batch(4096, 2));
  Rng rng(3);
  FeatureVector x;
  for (auto& v : x) v = rng.normal();
  const UcbParams params{1.0, 0.01};
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.ucb_score(x, params));
  }
}
BENCHMARK(BM_UcbScore);

void BM_IngestBatch(benchmark::State& state) {
  const auto batch = random_batch(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    LinUcbModel model;
    model.ingest_batch(batch);
    benchmark::DoNotOptimize(model.theta());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IngestBatch)->Arg(256)->Arg(4096);

void BM_GenerateDay(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.n_players = 20000;
  cfg.matches_per_day = state.range(0);
  cfg.days = 1;
  StreamGenerator gen(cfg);
  std::vector<ObservationEvent> day;
  for (auto _ : state) {
    day.clear();
    gen.generate_day(day);
    benchmark::DoNotOptimize(day.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          cfg.players_per_match);
}
BENCHMARK(BM_GenerateDay)->Arg(500)->Arg(2000);

void BM_Episode(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.n_players = 20000;
  cfg.matches_per_day = 1000;
  cfg.days = 5;
  const MatchStream stream = generate_stream(cfg);
  for (auto _ : state) {
    LinUcbPolicy policy(UcbParams{1.0, 0.01}, FeatureStats::defaults());
    RunOptions opts;
    opts.threads = static_cast<int>(state.range(0));
    const EpisodeLog log = run_episode(policy, stream, stream.days(), opts);
    benchmark::DoNotOptimize(log.days.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(stream.events.size()));
}
BENCHMARK(BM_Episode)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
