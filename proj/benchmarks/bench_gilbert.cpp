// Copyright 2026 The gilbert-hsd Authors
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

#include <vector>

#include "hsd/gilbert.hpp"
#include "hsd/linalg.hpp"
#include "hsd/states.hpp"
#include "hsd/symmetry.hpp"

namespace {

using namespace hsd;

DensityMatrix target_for(int d) { return d == 3 ? upb_tiles_state() : max_entangled(d); }

// Trials per second of the sequential loop, near convergence so that most
// trials are preselection rejections, as in long runs.
void BM_trial_throughput(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const DensityMatrix rho0 = target_for(d);
    RunResult warm = run(rho0, {}, {}, {.max_successes = 300}, {.seed = 1});
    RunState run_state = std::move(warm.state);
    StateSampler sampler({.seed = 2});
    for (auto _ : state) benchmark::DoNotOptimize(step(run_state, sampler));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_trial_throughput)->Arg(2)->Arg(3)->Arg(4);

void BM_sample_product(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    StateSampler sampler({.seed = 3});
    const Dims dims{d, d};
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample_product_vector(dims));
}
BENCHMARK(BM_sample_product)->Arg(2)->Arg(3)->Arg(4);

void BM_hs_inner(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ComplexMatrix a = ComplexMatrix::Identity(n, n) / n;
    const ComplexMatrix b = DensityMatrix::from_pure({n}, PureState::basis(n, 0)).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(hs_inner(a, b));
}
BENCHMARK(BM_hs_inner)->Arg(4)->Arg(9)->Arg(16)->Arg(64);

void BM_twirl(benchmark::State& state) {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    ComplexMatrix z(2, 2);
    z << 1, 0, 0, -1;
    const std::vector<SymmetryGenerator> gens{LocalUnitary{{x, x}}, LocalUnitary{{z, z}},
                                              PartyPermutation{{1, 0}}};
    const SymmetryGroup group = closure(gens, {2, 2});
    StateSampler sampler({.seed = 4});
    const ComplexMatrix rho = sampler.sample_product({2, 2}).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(twirl(rho, group));
}
BENCHMARK(BM_twirl);

}  // namespace

BENCHMARK_MAIN();
