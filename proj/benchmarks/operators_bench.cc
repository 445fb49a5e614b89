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

namespace {

const SparseState &s3_ground() {
    static const SparseState rho = prepare_ground_state(make_model(builtin_group("S3"), torus(2, 2)));
    return rho;
}

}  // namespace

static void BM_channel_Ev(benchmark::State &state) {
    const auto &rho = s3_ground();
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_channel_Ev(rho, 0).size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rho.size()));
}
BENCHMARK(BM_channel_Ev)->Unit(benchmark::kMillisecond);

static void BM_comb_diagonal(benchmark::State &state) {
    const auto &rho = s3_ground();
    const auto &model = rho.model();
    auto geo = default_nonabelian_geometry(model.lattice());
    auto comb = make_comb(model, geo.open, 1, Layer::Diagonal);
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_comb(rho, comb).size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rho.size()));
}
BENCHMARK(BM_comb_diagonal)->Unit(benchmark::kMillisecond);

static void BM_expectation_Bf(benchmark::State &state) {
    const auto &rho = s3_ground();
    auto spec = ProjectorSpec::bf(0, 0, Layer::Ket);
    for (auto _ : state) {
        benchmark::DoNotOptimize(expectation_in_rho(rho, spec));
    }
}
BENCHMARK(BM_expectation_Bf);

static void BM_projector_expectation_pure(benchmark::State &state) {
    const auto &rho = s3_ground();
    auto spec = ProjectorSpec::diag_av(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(projector_expectation_pure(rho, spec));
    }
}
BENCHMARK(BM_projector_expectation_pure)->Unit(benchmark::kMillisecond);
