// Copyright 2026 The qdouble Authors
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

#include <benchmark/benchmark.h>

#include "qdouble/experiments.h"

using namespace qdouble;

static void BM_prepare_z2_torus(benchmark::State &state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto model = make_model(builtin_group("Z2"), torus(n, n));
    for (auto _ : state) {
        auto rho = prepare_ground_state(model);
        benchmark::DoNotOptimize(rho.size());
    }
}
BENCHMARK(BM_prepare_z2_torus)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_prepare_s3_2x2(benchmark::State &state) {
    auto model = make_model(builtin_group("S3"), torus(2, 2));
    set_engine_options({static_cast<std::size_t>(state.range(0)), 1e-14});
    for (auto _ : state) {
        auto rho = prepare_ground_state(model);
        benchmark::DoNotOptimize(rho.size());
    }
    set_engine_options({});
}
BENCHMARK(BM_prepare_s3_2x2)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
