// Copyright 2026 The ANT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <memory>
#include <numeric>
#include <vector>

#include "ant/model.hpp"
#include "ant/optim.hpp"
#include "ant/random.hpp"
#include "ant/sparse_matrix.hpp"
#include "ant/tasks.hpp"

namespace {

using namespace ant;

struct Instance {
  SparseRowMatrix t;
  DenseMatrix a;
  std::vector<Index> batch;
};

Instance make_instance(std::size_t vocab, std::size_t k, std::size_t d, std::size_t per_row) {
  Instance in;
  in.t = init_transform(vocab, k, true, 1, TransformInit{per_row, 0.1});
  Rng rng(2);
  in.a = DenseMatrix(k, d);
  for (double& x : in.a.values()) x = standard_normal(rng);
  in.batch.resize(256);
  for (auto& i : in.batch) i = uniform_index(rng, vocab);
  return in;
}

// Rows of E for a batch without materializing E.
void BM_LookupRows(benchmark::State& state) {
  const auto in = make_instance(static_cast<std::size_t>(state.range(0)), 64, 64, 4);
  for (auto _ : state) benchmark::DoNotOptimize(lookup_rows(in.batch, in.t, in.a));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.batch.size()));
}
BENCHMARK(BM_LookupRows)->Arg(10000)->Arg(100000);

// The same rows read from a fully materialized E = T A.
void BM_SpmmThenGather(benchmark::State& state) {
  const auto in = make_instance(static_cast<std::size_t>(state.range(0)), 64, 64, 4);
  for (auto _ : state) {
    const DenseMatrix e = spmm(in.t, in.a);
    double s = 0.0;
    for (Index i : in.batch) s += e(i, 0);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.batch.size()));
}
BENCHMARK(BM_SpmmThenGather)->Arg(10000)->Arg(100000);

void BM_ProxStep(benchmark::State& state) {
  const auto in = make_instance(100000, 64, 1, 8);
  const ProxConfig cfg{1e-4, true, nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(prox_step(in.t, 0.01, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.t.nnz()));
}
BENCHMARK(BM_ProxStep);

void BM_YogiUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> p(n, 1.0), g(n, 0.5), m(n, 0.0), v(n, 0.0);
  const StepContext ctx = make_step_context(YogiConfig{}, 1);
  for (auto _ : state) {
    yogi_update(p, g, m, v, ctx);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_YogiUpdate)->Arg(1024)->Arg(65536);

RatingsDataset bench_ratings() {
  Rng rng(3);
  RatingsDataset d;
  d.n_users = 2000;
  d.n_items = 1000;
  for (int i = 0; i < 50000; ++i) {
    d.triples.push_back({uniform_index(rng, 2000), uniform_index(rng, 1000),
                         1.0 + static_cast<double>(uniform_index(rng, 5))});
  }
  d.global_mean = 3.0;
  return d;
}

// One epoch of matrix factorization; range(0) = 0 for dense tables, else K.
void BM_MfEpoch(benchmark::State& state) {
  const RatingsDataset data = bench_ratings();
  const auto k = static_cast<std::size_t>(state.range(0));
  auto table = [&](std::size_t rows, std::uint64_t seed) -> std::unique_ptr<EmbeddingTable> {
    if (k == 0) return std::make_unique<DenseEmbedding>(DenseEmbedding::gaussian(rows, 16, 0.1, seed));
    Regularization reg;
    reg.lambda2 = 1e-4;
    return std::make_unique<AntEmbedding>(
        make_ant_model(rows, AnchorPlan{AnchorStrategy::kRandom, k, seed, {}}, 16, reg, seed));
  };
  MatrixFactorization mf(table(2000, 1), table(1000, 2), data);
  std::vector<std::size_t> order(data.triples.size());
  std::iota(order.begin(), order.end(), 0);
  StepClock clock;
  for (auto _ : state) train_epoch(mf, order, 32, clock);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(order.size()));
}
BENCHMARK(BM_MfEpoch)->Arg(0)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
