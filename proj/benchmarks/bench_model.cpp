// Copyright 2026 the nolgat authors
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

#include "nolgat/model.hpp"
#include "nolgat/synth.hpp"
#include "nolgat/train.hpp"

namespace {

using namespace nolgat;

struct Bench {
  SynthTask task;
  HopIndex hops;
  Value x;

  explicit Bench(std::size_t n) : task(synth_longrange(n, 3, 1)) {
    hops = build_hop_index(task.graph, 8);
    x = make_constant({task.dataset.features.n, task.dataset.features.dim},
                      task.dataset.features.rows);
  }
};

NolGatConfig bench_config(RelaxationMode mode, bool baseline = false) {
  NolGatConfig cfg;
  cfg.layers = 2;
  cfg.hidden = {16, 8};
  cfg.heads = {2, 2};
  cfg.mlp_hidden = {8};
  cfg.relaxation = mode;
  cfg.baseline_mode = baseline;
  return cfg;
}

void BM_ForwardStraightThrough(benchmark::State& state) {
  Bench b(static_cast<std::size_t>(state.range(0)));
  ParamStore ps(1);
  NolGatModel model(ps, bench_config(RelaxationMode::kStraightThrough), 8,
                    b.hops.max_order + 1);
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    ForwardOptions opts;
    opts.epoch = epoch++;
    benchmark::DoNotOptimize(model.forward(b.x, b.hops, 7, opts));
  }
}
BENCHMARK(BM_ForwardStraightThrough)->Arg(600)->Arg(1200)
    ->Unit(benchmark::kMillisecond);

void BM_ForwardDenseRelaxed(benchmark::State& state) {
  Bench b(static_cast<std::size_t>(state.range(0)));
  ParamStore ps(1);
  NolGatModel model(ps, bench_config(RelaxationMode::kDenseRelaxed), 8,
                    b.hops.max_order + 1);
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    ForwardOptions opts;
    opts.epoch = epoch++;
    benchmark::DoNotOptimize(model.forward(b.x, b.hops, 7, opts));
  }
}
BENCHMARK(BM_ForwardDenseRelaxed)->Arg(600)->Arg(1200)
    ->Unit(benchmark::kMillisecond);

void BM_ForwardBaseline(benchmark::State& state) {
  Bench b(static_cast<std::size_t>(state.range(0)));
  ParamStore ps(1);
  NolGatModel model(ps, bench_config(RelaxationMode::kStraightThrough, true), 8,
                    b.hops.max_order + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(b.x, b.hops, 7, {}));
  }
}
BENCHMARK(BM_ForwardBaseline)->Arg(600)->Arg(1200)
    ->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  Bench b(600);
  ParamStore ps(1);
  NolGatModel model(ps, bench_config(RelaxationMode::kStraightThrough), 8,
                    b.hops.max_order + 1);
  AdamState adam{AdamConfig{}};
  SplitSpec split = make_split(b.task.dataset.labels, 0.3, 3);
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    ForwardOptions opts;
    opts.epoch = epoch++;
    opts.training = true;
    ModelForward mf = model.forward(b.x, b.hops, 7, opts);
    Value loss = masked_bce_loss(mf.probabilities, b.task.dataset.labels,
                                 split.labeled_mask);
    backward(loss);
    adam.step(ps);
  }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
