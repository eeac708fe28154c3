// Copyright 2026 The ttfscat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// OpenMP kernels against their serial twins.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "ttfscat/convert.h"
#include "ttfscat/dataset.h"
#include "ttfscat/kernels.h"
#include "ttfscat/snn_engine.h"

namespace ttfscat {
namespace {

std::vector<double> Random(size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

template <bool kParallel>
void BM_DenseForward(benchmark::State& state) {
  const kernels::DenseDims d{int(state.range(0)), 256, 256};
  const auto in = Random(size_t(d.batch) * d.in, 1);
  const auto w = Random(size_t(d.in) * d.out, 2);
  const auto b = Random(d.out, 3);
  std::vector<double> out(size_t(d.batch) * d.out);
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::DenseForward(d, in, w, b, out);
    } else {
      kernels::reference::DenseForward(d, in, w, b, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * d.batch * d.in * d.out);
}
BENCHMARK(BM_DenseForward<true>)->Arg(32)->Arg(128);
BENCHMARK(BM_DenseForward<false>)->Arg(32)->Arg(128);

template <bool kParallel>
void BM_Conv2dForward(benchmark::State& state) {
  const Conv2dGeometry g{16, 16, 16, 32, 3, 1, 1};
  const int batch = int(state.range(0));
  const auto in = Random(size_t(batch) * g.input_size(), 1);
  const auto w = Random(g.weight_count(), 2);
  const auto b = Random(g.out_channels, 3);
  std::vector<double> out(size_t(batch) * g.output_size());
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::Conv2dForward(batch, g, in, w, b, out);
    } else {
      kernels::reference::Conv2dForward(batch, g, in, w, b, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Conv2dForward<true>)->Arg(8);
BENCHMARK(BM_Conv2dForward<false>)->Arg(8);

template <bool kParallel>
void BM_Conv2dBackwardParams(benchmark::State& state) {
  const Conv2dGeometry g{16, 16, 16, 32, 3, 1, 1};
  const int batch = 8;
  const auto in = Random(size_t(batch) * g.input_size(), 1);
  const auto dout = Random(size_t(batch) * g.output_size(), 2);
  std::vector<double> dw(g.weight_count()), db(g.out_channels);
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::Conv2dBackwardParams(batch, g, in, dout, dw, db);
    } else {
      kernels::reference::Conv2dBackwardParams(batch, g, in, dout, dw, db);
    }
    benchmark::DoNotOptimize(dw.data());
  }
}
BENCHMARK(BM_Conv2dBackwardParams<true>);
BENCHMARK(BM_Conv2dBackwardParams<false>);

struct EngineFixture {
  EngineFixture() {
    BlobOptions bo;
    bo.features = 64;
    bo.num_classes = 10;
    bo.samples_per_class = 20;
    data = MakeBlobs(bo);
    const Network net = BuildNetwork(data.shape, ParseLayerDescs("dense:128,dense:64"),
                                     10, false, KernelParams{}, 1);
    engine = std::make_unique<SnnEngine>(Convert(net, data, {}),
                                         Precision::kFixedPoint);
  }
  Dataset data;
  std::unique_ptr<SnnEngine> engine;
};

template <bool kParallel>
void BM_RunBatch(benchmark::State& state) {
  static const EngineFixture f;
  for (auto _ : state) {
    BatchResult r = kParallel ? RunBatch(*f.engine, f.data)
                              : RunBatchSerial(*f.engine, f.data);
    benchmark::DoNotOptimize(r.accuracy);
  }
  state.SetItemsProcessed(state.iterations() * f.data.size());
}
BENCHMARK(BM_RunBatch<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBatch<false>)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace ttfscat

BENCHMARK_MAIN();
