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

#include "hsd/gilbert.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "hsd/states.hpp"
#include "hsd/symmetry.hpp"
#include "test_util.hpp"

using namespace hsd;
using namespace hsd::testing;

namespace {

DensityMatrix product_ket(const ComplexVector& a, const ComplexVector& b) {
    const ComplexVector v = kron(a, b);
    return DensityMatrix::trusted({2, 2}, v * v.adjoint());
}

ComplexVector qubit(double theta) {
    ComplexVector v(2);
    v << std::cos(theta / 2), std::sin(theta / 2);
    return v;
}

HaltCriteria successes(std::uint64_t n) { return {.max_successes = n}; }

// Runs with a callback that checks the per-success invariants and returns
// the run result.
struct Checked {
    double floor = 0.0;
    int check_every = 25;
    double worst_gap = 1e300;           // min over records of d2 - floor
    double worst_recompute = 0.0;       // max |d2 - recomputed|
    double worst_psd = 0.0;             // most negative eigenvalue of rho1
    double worst_ppt = 0.0;             // most negative partial-transpose eigenvalue
    double worst_trace = 0.0;
    double worst_hermitian = 0.0;
    bool strictly_decreasing = true;
};

RunResult checked_run(const DensityMatrix& rho0, std::optional<SymmetryGroup> group,
                      HaltCriteria halt, SamplerConfig cfg, Checked& c, unsigned threads = 1) {
    double last = 1e300;
    std::uint64_t last_ct = 0;
    std::uint64_t last_cs = 0;
    RunOptions options;
    options.threads = threads;
    options.on_success = [&](const RunState& s, const TraceRecord& r) {
        c.worst_gap = std::min(c.worst_gap, r.d2 - c.floor);
        if (!(r.d2 < last) || !(r.c_t > last_ct) || !(r.c_s > last_cs) || r.c_s > r.c_t) {
            c.strictly_decreasing = false;
        }
        last = r.d2;
        last_ct = r.c_t;
        last_cs = r.c_s;
        if (r.c_s % c.check_every == 0) {
            const ComplexMatrix& m = s.rho1().matrix();
            c.worst_recompute = std::max(c.worst_recompute, std::abs(r.d2 - s.recomputed_d2()));
            c.worst_psd = std::min(c.worst_psd, min_eigenvalue(m));
            c.worst_ppt = std::min(c.worst_ppt, min_ppt_eigenvalue(s.rho1()));
            c.worst_trace = std::max(c.worst_trace, std::abs(m.trace() - 1.0));
            c.worst_hermitian = std::max(c.worst_hermitian, hermitian_defect(m));
        }
    };
    return run(rho0, {}, std::move(group), halt, cfg, options);
}

void expect_invariants(const Checked& c) {
    EXPECT_GE(c.worst_gap, -1e-9);
    EXPECT_TRUE(c.strictly_decreasing);
    EXPECT_LE(c.worst_recompute, 1e-10);
    EXPECT_GE(c.worst_psd, -1e-9);
    EXPECT_GE(c.worst_ppt, -1e-9);
    EXPECT_LE(c.worst_trace, 1e-9);
    EXPECT_LE(c.worst_hermitian, 1e-12);
}

}  // namespace

TEST(gilbert, preselect_examples) {
    const DensityMatrix rho0 = bell();
    const DensityMatrix rho1 = DensityMatrix::maximally_mixed({2, 2});
    EXPECT_EQ(preselect(rho0, rho1, rho1), 0.0);
    EXPECT_NEAR(preselect(rho0, rho1, rho0), hsd_sq(rho0, rho1), 1e-15);
    const DensityMatrix rho2 = DensityMatrix::trusted({2, 2}, ket_bra(4, 0, 0));
    const double brute = naive_trace_product(rho2.matrix() - rho1.matrix(),
                                             rho0.matrix() - rho1.matrix()).real();
    EXPECT_DOUBLE_EQ(brute, 0.25);
    EXPECT_NEAR(preselect(rho0, rho1, rho2), brute, 1e-15);
    EXPECT_THROW(preselect(rho0, DensityMatrix::maximally_mixed({4}), rho2), DimensionError);
}

TEST(gilbert, optimal_p_examples) {
    std::mt19937_64 rng(2);
    const DensityMatrix a = random_density({2, 2}, rng);
    const DensityMatrix b = random_density({2, 2}, rng);
    const LineSearch same = optimal_p(a, a, b);
    EXPECT_NEAR(same.p, 1.0, 1e-14);
    EXPECT_NEAR(same.new_d2, 0.0, 1e-14);
    const LineSearch reach = optimal_p(a, b, a);
    EXPECT_EQ(reach.p, 0.0);
    EXPECT_NEAR(reach.p_unclamped, 0.0, 1e-14);
    EXPECT_NEAR(reach.new_d2, 0.0, 1e-14);
    EXPECT_THROW(optimal_p(a, b, b), DegenerateError);
}

TEST(gilbert, optimal_p_matches_numerical_line_search) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix r0 = random_density({2, 2}, rng);
        const DensityMatrix r1 = random_density({2, 2}, rng);
        const DensityMatrix r2 = random_density({2, 2}, rng);
        auto f = [&](double p) {
            const ComplexMatrix d = r0.matrix() - p * r1.matrix() - (1 - p) * r2.matrix();
            return naive_trace_product(d, d).real();
        };
        const LineSearch ls = optimal_p(r0, r1, r2);
        // The objective is an exact quadratic: its vertex from three samples.
        const double vertex = (f(-1) - f(1)) / (2.0 * (f(-1) - 2.0 * f(0) + f(1)));
        EXPECT_NEAR(ls.p_unclamped, vertex, 1e-10);
        const double golden = golden_section_minimize_quad(
            [&](quad p) { return line_objective_quad(r0.matrix(), r1.matrix(), r2.matrix(), p); },
            -20.0, 20.0);
        EXPECT_NEAR(ls.p_unclamped, golden, 1e-10);
        EXPECT_NEAR(ls.new_d2, f(ls.p), 1e-12);
        EXPECT_GE(ls.p, 0.0);
        EXPECT_LE(ls.p, 1.0);
    }
}

TEST(gilbert, separable_target_rejects_every_trial) {
    const DensityMatrix target = css_ghz(3);
    RunState state(target, target);
    StateSampler sampler({.seed = 4});
    for (int i = 0; i < 2000; ++i) {
        const StepOutcome out = step(state, sampler);
        ASSERT_TRUE(std::holds_alternative<Rejection>(out));
        EXPECT_EQ(std::get<Rejection>(out), Rejection::preselect_failed);
    }
    EXPECT_EQ(state.trials(), 2000u);
    EXPECT_EQ(state.successes(), 0u);
}

TEST(gilbert, first_accepted_step_improves_bell) {
    const DensityMatrix rho1 = DensityMatrix::maximally_mixed({2, 2});
    RunState state(bell(), rho1);
    EXPECT_NEAR(state.d2(), 0.75, 1e-15);
    StateSampler sampler({.seed = 1});
    for (;;) {
        const StepOutcome out = step(state, sampler);
        if (const auto* rec = std::get_if<TraceRecord>(&out)) {
            EXPECT_LT(rec->d2, 0.75);
            EXPECT_EQ(rec->c_s, 1u);
            EXPECT_EQ(rec->c_t, state.trials());
            EXPECT_NEAR(rec->d2, state.recomputed_d2(), 1e-12);
            break;
        }
    }
}

TEST(gilbert, accepted_trial_matches_line_search) {
    std::mt19937_64 rng(15);
    StateSampler sampler({.seed = 15});
    for (int i = 0; i < 200; ++i) {
        const DensityMatrix rho0 = random_density({2, 3}, rng);
        const DensityMatrix rho1 = random_separable({2, 3}, 3, rng);
        RunState state(rho0, rho1);
        const ComplexVector psi = sampler.sample_product_vector({2, 3});
        const DensityMatrix rho2 = DensityMatrix::trusted({2, 3}, psi * psi.adjoint());
        EXPECT_NEAR(state.preselect_pure(psi), preselect(rho0, rho1, rho2), 1e-12);
        const double before = state.d2();
        state.count_trials(1);
        const StepOutcome out = state.consider(psi);
        if (const auto* rec = std::get_if<TraceRecord>(&out)) {
            const LineSearch ls = optimal_p(rho0, rho1, rho2);
            EXPECT_GT(preselect(rho0, rho1, rho2), 0.0);
            EXPECT_LT(rec->d2, before);
            EXPECT_NEAR(rec->d2, ls.new_d2, 1e-10);
            EXPECT_NEAR(rec->d2, state.recomputed_d2(), 1e-10);
            EXPECT_LE((state.rho1().matrix() - (ls.p * rho1.matrix() + (1 - ls.p) * rho2.matrix()))
                          .norm(),
                      1e-12);
        } else {
            EXPECT_EQ(state.d2(), before);
            EXPECT_EQ(state.rho1().matrix(), rho1.matrix());
        }
    }
}

TEST(gilbert, overshooting_minimizer_is_rejected) {
    // rho1 and rho0 are product states on either side of the trial, 120 degrees
    // apart on the Bloch sphere; the trial is 60 degrees from each, so the
    // exact minimizer lies past rho2.
    const ComplexVector zero = qubit(0.0);
    const DensityMatrix rho1 = product_ket(qubit(std::numbers::pi / 3), zero);
    const DensityMatrix rho0 = product_ket(qubit(-std::numbers::pi / 3), zero);
    const ComplexVector psi = kron(zero, zero);
    const DensityMatrix rho2 = DensityMatrix::trusted({2, 2}, psi * psi.adjoint());
    EXPECT_NEAR(preselect(rho0, rho1, rho2), 0.75, 1e-15);
    EXPECT_NEAR(optimal_p(rho0, rho1, rho2).p_unclamped, -0.5, 1e-14);
    RunState state(rho0, rho1);
    state.count_trials(1);
    const StepOutcome out = state.consider(psi);
    ASSERT_TRUE(std::holds_alternative<Rejection>(out));
    EXPECT_EQ(std::get<Rejection>(out), Rejection::p_out_of_range);
    EXPECT_EQ(state.successes(), 0u);
}

TEST(gilbert, bell_converges_near_analytic_distance) {
    Checked c{.floor = 1.0 / 3.0};
    const RunResult r = checked_run(bell(), {}, successes(1000), {.seed = 7}, c);
    EXPECT_EQ(r.state.successes(), 1000u);
    EXPECT_EQ(r.trace.size(), 1000u);
    EXPECT_GE(r.state.d2(), 1.0 / 3.0);
    EXPECT_LE(r.state.d2(), 1.0 / 3.0 + 0.01);
    expect_invariants(c);
}

TEST(gilbert, invariants_hold_on_known_targets) {
    struct Case {
        DensityMatrix rho0;
        double floor;
        std::uint64_t successes;
    };
    const std::vector<Case> cases{
        {max_entangled(3), max_entangled_distance_sq(3), 400},
        {max_entangled(4), max_entangled_distance_sq(4), 200},
        {max_entangled(5), max_entangled_distance_sq(5), 100},
        {ghz(3), ghz_distance_sq(3), 400},
        {ghz(4), ghz_distance_sq(4), 200},
    };
    std::uint64_t seed = 100;
    for (const auto& cs : cases) {
        Checked c{.floor = cs.floor};
        const RunResult r = checked_run(cs.rho0, {}, successes(cs.successes), {.seed = seed++}, c);
        EXPECT_EQ(r.state.successes(), cs.successes);
        expect_invariants(c);
    }
}

TEST(gilbert, invariants_hold_with_symmetry_and_real_sampling) {
    const std::vector<SymmetryGenerator> gens{
        LocalUnitary{{pauli_x(), pauli_x()}}, LocalUnitary{{pauli_z(), pauli_z()}},
        PartyPermutation{{1, 0}}};
    Checked c{.floor = 1.0 / 3.0, .check_every = 5};
    const RunResult r = checked_run(bell(), closure(gens, {2, 2}), successes(60), {.seed = 3}, c);
    EXPECT_EQ(r.state.successes(), 60u);
    expect_invariants(c);

    Checked real{.floor = 3.0 / 8.0};
    checked_run(bell(), {}, successes(500), {.mode = SamplingMode::real, .seed = 3}, real);
    expect_invariants(real);
}

TEST(gilbert, seeded_runs_are_reproducible) {
    const HaltCriteria halt = successes(300);
    const RunResult a = run(ghz(3), {}, {}, halt, {.seed = 11});
    const RunResult b = run(ghz(3), {}, {}, halt, {.seed = 11});
    const RunResult c = run(ghz(3), {}, {}, halt, {.seed = 12});
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.state.rho1().matrix(), b.state.rho1().matrix());
    EXPECT_NE(a.trace, c.trace);

    const RunResult bm1 = run(bell(), {}, {}, halt, {.seed = 11, .source = GaussianSource::box_muller});
    const RunResult bm2 = run(bell(), {}, {}, halt, {.seed = 11, .source = GaussianSource::box_muller});
    EXPECT_EQ(bm1.trace, bm2.trace);
}

TEST(gilbert, parallel_mode_is_sound_and_deterministic_per_thread_count) {
    Checked c{.floor = ghz_distance_sq(3)};
    const RunResult a = checked_run(ghz(3), {}, successes(400), {.seed = 5}, c, 2);
    EXPECT_EQ(a.state.successes(), 400u);
    expect_invariants(c);
    Checked again{.floor = ghz_distance_sq(3)};
    const RunResult b = checked_run(ghz(3), {}, successes(400), {.seed = 5}, again, 2);
    EXPECT_EQ(a.trace, b.trace);
}

TEST(gilbert, trial_budgets_are_exact) {
    for (unsigned threads : {1u, 2u, 3u}) {
        RunOptions options;
        options.threads = threads;
        const RunResult r = run(bell(), {}, {}, {.max_trials = 12345}, {.seed = 1}, options);
        EXPECT_EQ(r.state.trials(), 12345u) << threads;
        EXPECT_LE(r.state.successes(), r.state.trials());

        const RunResult s = run(css_ghz(3), css_ghz(3), {}, {.stall_trials = 777}, {.seed = 1}, options);
        EXPECT_EQ(s.state.trials(), 777u) << threads;
        EXPECT_TRUE(s.trace.empty());
    }
}

TEST(gilbert, target_d2_halts) {
    const RunResult r = run(bell(), {}, {}, {.target_d2 = 0.4}, {.seed = 2});
    EXPECT_LE(r.state.d2(), 0.4);
    ASSERT_GE(r.trace.size(), 2u);
    EXPECT_GT(r.trace[r.trace.size() - 2].d2, 0.4);
}

TEST(gilbert, separable_start_at_target_never_moves) {
    const RunResult r = run(css_ghz(4), css_ghz(4), {}, {.max_trials = 20000}, {.seed = 9});
    EXPECT_TRUE(r.trace.empty());
    EXPECT_EQ(r.state.d2(), 0.0);
}

TEST(gilbert, ghz4_from_its_css_finds_no_correction) {
    const double start = ghz_distance_sq(4);
    const RunResult r = run(ghz(4), css_ghz(4), {}, {.max_trials = 20000}, {.seed = 9});
    EXPECT_LE(r.state.d2(), start + 1e-12);
    EXPECT_LT(start - r.state.d2(), 1e-4);
}

TEST(gilbert, run_validates_inputs) {
    EXPECT_THROW(run(bell(), {}, {}, {}, {}), ParameterError);
    EXPECT_THROW(run(bell(), DensityMatrix::maximally_mixed({4}), {}, successes(1), {}),
                 DimensionError);
    EXPECT_THROW(run(bell(), {}, SymmetryGroup::trivial({2, 3}), successes(1), {}), DimensionError);
    RunOptions zero;
    zero.threads = 0;
    EXPECT_THROW(run(bell(), {}, {}, successes(1), {}, zero), ParameterError);
    EXPECT_THROW(HaltCriteria{}.validate(), ParameterError);
    EXPECT_NO_THROW(HaltCriteria{.stall_trials = 1}.validate());
}
