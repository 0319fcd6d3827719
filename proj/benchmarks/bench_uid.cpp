//------------------------------------------------------------------------------
//
//   Copyright 2026 The uidscan Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#include <random>

#include <benchmark/benchmark.h>

#include "uidscan/logreg.hpp"
#include "uidscan/synthetic.hpp"
#include "uidscan/uid_features.hpp"

namespace {

using namespace uidscan;

std::vector<double> surprisals(std::size_t n)
{
  std::mt19937_64                       rng(42);
  std::gamma_distribution<double>       gamma(2.25, 4.0 / 3.0);
  std::vector<double>                   u(n);
  for (double &v : u)
  {
    v = gamma(rng);
  }
  return u;
}

void BM_ExtremeSpans(benchmark::State &state)
{
  auto const u = surprisals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(extreme_spans(u, 20));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtremeSpans)->RangeMultiplier(4)->Range(64, 65536);

// Baseline: recompute every window from scratch.
void BM_WindowVariancesNaive(benchmark::State &state)
{
  auto const        u = surprisals(static_cast<std::size_t>(state.range(0)));
  std::size_t const n = 20;
  for (auto _ : state)
  {
    double best = 0.0;
    for (std::size_t off = 0; off + n <= u.size(); ++off)
    {
      best = std::max(best, uid_variance(std::span<double const>(u).subspan(off, n)));
    }
    benchmark::DoNotOptimize(best);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WindowVariancesNaive)->RangeMultiplier(4)->Range(64, 65536);

void BM_Featurize(benchmark::State &state)
{
  auto const    u = surprisals(static_cast<std::size_t>(state.range(0)));
  FeatureConfig cfg;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(featurize(u, cfg, "doc"));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Featurize)->Arg(512)->Arg(4096);

void BM_FeaturizeCorpus(benchmark::State &state)
{
  auto const corpus = make_synthetic_corpus(dispersion_pair(500, 1));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(featurize_corpus(corpus, FeatureConfig{}, static_cast<unsigned>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_FeaturizeCorpus)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State &state)
{
  auto const corpus = make_synthetic_corpus(burst_pair(static_cast<std::size_t>(state.range(0)), 3));
  auto const table  = featurize_corpus(corpus, FeatureConfig{});
  Matrix     x(table.records.size(), table.feature_dim);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < table.records.size(); ++i)
  {
    std::copy(table.records[i].features.begin(), table.records[i].features.end(), x.row(i).begin());
    labels.push_back(*table.records[i].label);
  }
  std::vector<std::string> const label_set{"bursty", "steady"};
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(train(x, labels, label_set, TrainConfig{}));
  }
}
BENCHMARK(BM_Train)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
