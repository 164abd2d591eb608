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

#include "nolgat/autodiff.hpp"
#include "nolgat/optim.hpp"
#include "nolgat/rng.hpp"

namespace {

using namespace nolgat;

std::vector<double> randv(std::size_t n, std::uint64_t seed) {
  RngStream rng = RngStream::keyed({seed});
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_uniform(-1.0, 1.0);
  return v;
}

void BM_MatmulForward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Value a = make_constant({n, n}, randv(n * n, 1));
  Value b = make_constant({n, n}, randv(n * n, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_MatmulForward)->Arg(64)->Arg(128)->Arg(256);

void BM_MatmulTrainStep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  ParamStore ps(3);
  Value w = ps.create("w", {n, n}, Init::kGlorotUniform);
  Value x = make_constant({n, n}, randv(n * n, 4));
  AdamState adam{AdamConfig{}};
  for (auto _ : state) {
    Value loss = mean_all(mul(matmul(x, w), matmul(x, w)));
    backward(loss);
    adam.step(ps);
  }
}
BENCHMARK(BM_MatmulTrainStep)->Arg(64)->Arg(128);

void BM_SegmentSoftmaxBackward(benchmark::State& state) {
  const std::size_t edges = static_cast<std::size_t>(state.range(0));
  std::vector<std::int32_t> seg(edges);
  for (std::size_t i = 0; i < edges; ++i) {
    seg[i] = static_cast<std::int32_t>(i / 8);
  }
  for (auto _ : state) {
    Value x = make_leaf({edges, 1}, randv(edges, 7), true);
    Value weighted = mul(segment_softmax(x, seg), make_constant({edges, 1}, randv(edges, 8)));
    backward(sum_all(weighted));
    benchmark::DoNotOptimize(x->grad.data());
  }
  state.SetItemsProcessed(state.iterations() * edges);
}
BENCHMARK(BM_SegmentSoftmaxBackward)->Arg(1 << 12)->Arg(1 << 15);

}  // namespace

BENCHMARK_MAIN();
