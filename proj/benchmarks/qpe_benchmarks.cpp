#include <benchmark/benchmark.h>

#include "qpe/chi.hpp"
#include "qpe/design.hpp"
#include "qpe/fourier_posterior.hpp"
#include "qpe/multi_posterior.hpp"
#include "qpe/prony.hpp"
#include "qpe/signal.hpp"
#include "qpe/simulator.hpp"

namespace {

using namespace qpe;

// Post-processing of single-round records: g(k) reconstruction plus an l = 1
// shift estimate.
void BM_SingleFrequencyEstimate(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto counts = run_schedule(Spectrum::single(0.4321), ts_single_round_schedule(K, 1000000), NoiseModel::none(), 7);
  for (auto _ : state) {
    const auto est = estimate(g_from_single_round(counts), PronyOptions{1, PronyMode::symmetric, false});
    benchmark::DoNotOptimize(select_target(est, TargetPolicy::max_amplitude));
  }
}
BENCHMARK(BM_SingleFrequencyEstimate)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PronyFullWindow(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  std::vector<SpectralLine> lines;
  for (int j = 0; j < 10; ++j) lines.push_back({Phase(-3.0 + 0.6 * j), 0.1});
  const auto counts = run_schedule(Spectrum::normalized(lines), ts_single_round_schedule(K, 100000), NoiseModel::none(), 8);
  const auto g = g_from_single_round(counts);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(g, PronyOptions{(K + 1) / 2, PronyMode::symmetric, false}));
}
BENCHMARK(BM_PronyFullWindow)->Arg(20)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PosteriorUpdate(benchmark::State& state) {
  const int n_freq = static_cast<int>(state.range(0));
  const auto truth = Spectrum::single(0.3);
  Rng rng = make_rng(9);
  auto outcome = [&](int k, double beta) {
    return sample_experiment(truth, ExperimentSpec::single(k, beta), NoiseModel::none(), rng)[0];
  };
  // Fill the band so every update touches all coefficients; restart from
  // there before truncation distorts the density.
  auto filled = init_flat(n_freq);
  for (int i = 0; filled.bandwidth() < n_freq - 1; ++i) {
    const double beta = kTwoPi * uniform01(rng);
    filled.update(1 + i % 50, beta, outcome(1 + i % 50, beta));
  }
  auto post = filled;
  int i = 0;
  for (auto _ : state) {
    const int k = 1 + i % 50;
    const double beta = kTwoPi * uniform01(rng);
    post.update(k, beta, outcome(k, beta));
    if (++i % 256 == 0) post = filled;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PosteriorUpdate)->Arg(1000)->Arg(5000)->Arg(20000);

void BM_MultiPosteriorUpdate(benchmark::State& state) {
  const int n_track = static_cast<int>(state.range(0));
  auto post = MultiEigPosterior::flat(n_track, 2000);
  AdaptiveDesign design(50);
  Rng rng = make_rng(10);
  const auto truth = Spectrum::normalized({{Phase(0.3), 0.5}, {Phase(1.2), 0.5}});
  for (auto _ : state) {
    const auto round = design.next(0.01, rng);
    const auto m = sample_experiment(truth, ExperimentSpec::single(round.k, round.beta), NoiseModel::none(), rng);
    post.update(std::span<const RoundSpec>(&round, 1), m);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MultiPosteriorUpdate)->Arg(1)->Arg(2)->Arg(10);

void BM_ChiTable(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ChiTable(K));
}
BENCHMARK(BM_ChiTable)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SampleSchedule(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto schedule = ts_single_round_schedule(K, 1000000);
  const auto truth = Spectrum::normalized({{Phase(0.3), 0.5}, {Phase(1.2), 0.5}});
  Rng rng = make_rng(11);
  for (auto _ : state) benchmark::DoNotOptimize(sample_schedule(truth, schedule, NoiseModel::none(), rng));
}
BENCHMARK(BM_SampleSchedule)->Arg(50)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
