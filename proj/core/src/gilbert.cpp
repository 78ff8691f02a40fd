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

#include <algorithm>
#include <barrier>
#include <chrono>
#include <thread>

namespace hsd {
namespace {

// Full recomputation of the cached inner products every this many accepted
// corrections bounds the drift of the running expansion.
constexpr std::uint64_t kRefreshInterval = 1024;

// Frobenius distance below which rho1 and rho2 are treated as the same point.
constexpr double kDegenerateDistance = 1e-14;

double quadratic_form(const ComplexVector& v, const ComplexMatrix& m) {
    return v.dot(m * v).real();
}

// Tr[A B] for Hermitian operators known to be well formed.
double inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.array() * b.conjugate().array()).sum().real();
}

void require_same_dims(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
    if (a.dims() != b.dims()) {
        throw DimensionError(std::string(what) + ": subsystem dimensions differ");
    }
}

}  // namespace

void HaltCriteria::validate() const {
    if (!max_successes && !max_trials && !target_d2 && !stall_trials) {
        throw ParameterError("halt criteria: at least one criterion must be set");
    }
}

double preselect(const DensityMatrix& rho0, const DensityMatrix& rho1, const DensityMatrix& rho2) {
    require_same_dims(rho0, rho1, "preselect");
    require_same_dims(rho0, rho2, "preselect");
    return inner(rho2.matrix() - rho1.matrix(), rho0.matrix() - rho1.matrix());
}

LineSearch optimal_p(const DensityMatrix& rho0, const DensityMatrix& rho1,
                     const DensityMatrix& rho2) {
    require_same_dims(rho0, rho1, "optimal_p");
    require_same_dims(rho0, rho2, "optimal_p");
    const ComplexMatrix target = rho0.matrix() - rho2.matrix();
    const ComplexMatrix direction = rho1.matrix() - rho2.matrix();
    const double c = direction.squaredNorm();
    if (std::sqrt(c) <= kDegenerateDistance) {
        throw DegenerateError("optimal_p: rho1 and rho2 coincide");
    }
    // D^2(p) = A - 2 p B + p^2 C along rho0 - rho2 - p (rho1 - rho2).
    const double a = target.squaredNorm();
    const double b = inner(target, direction);
    LineSearch out;
    out.p_unclamped = b / c;
    out.p = std::clamp(out.p_unclamped, 0.0, 1.0);
    out.new_d2 = std::max(0.0, a - 2.0 * out.p * b + out.p * out.p * c);
    return out;
}

RunState::RunState(DensityMatrix rho0, DensityMatrix rho1, std::optional<SymmetryGroup> group)
    : rho0_(std::move(rho0)), rho1_(std::move(rho1)), group_(std::move(group)) {
    require_same_dims(rho0_, rho1_, "RunState");
    if (group_ && group_->dims() != rho0_.dims()) {
        throw DimensionError("RunState: symmetry group dimensions differ from the state");
    }
    s00_ = inner(rho0_.matrix(), rho0_.matrix());
    refresh_caches();
}

void RunState::refresh_caches() {
    delta_ = rho0_.matrix() - rho1_.matrix();
    s01_ = inner(rho0_.matrix(), rho1_.matrix());
    s11_ = inner(rho1_.matrix(), rho1_.matrix());
    d2_ = delta_.squaredNorm();
}

double RunState::recomputed_d2() const { return hsd_sq(rho0_, rho1_); }

double RunState::preselect_pure(const ComplexVector& psi) const {
    // Tr[(rho2 - rho1) Delta] = <psi|Delta|psi> - Tr[rho1 Delta].
    return quadratic_form(psi, delta_) - (s01_ - s11_);
}

void RunState::count_trials(std::uint64_t trials) {
    trials_ += trials;
    since_success_ += trials;
}

StepOutcome RunState::consider(const ComplexVector& psi) {
    const double rho1_delta = s01_ - s11_;
    const double psi_delta = quadratic_form(psi, delta_);
    double gain = psi_delta - rho1_delta;
    if (!(gain > 0.0)) return Rejection::preselect_failed;

    // Overlaps of the trial with rho0 and rho1, and its purity.
    double t0 = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    ComplexMatrix trial;
    if (group_ && group_->order() > 1) {
        trial = twirl(ComplexMatrix(psi * psi.adjoint()), *group_);
        trial = (trial + trial.adjoint()).eval() / 2.0;
        t0 = inner(trial, rho0_.matrix());
        t1 = inner(trial, rho1_.matrix());
        t2 = inner(trial, trial);
        gain = (t0 - t1) - rho1_delta;
        if (!(gain > 0.0)) return Rejection::preselect_failed;
    } else {
        t1 = quadratic_form(psi, rho1_.matrix());
        t0 = psi_delta + t1;
        const double norm2 = psi.squaredNorm();
        t2 = norm2 * norm2;
    }

    // ||rho2 - rho1||^2; the optimum mixes in q = gain / dist2 of rho2.
    const double dist2 = s11_ - 2.0 * t1 + t2;
    if (!(std::sqrt(std::max(dist2, 0.0)) > kDegenerateDistance)) return Rejection::degenerate;
    const double q = gain / dist2;
    const double p = 1.0 - q;
    if (p < 0.0) return Rejection::p_out_of_range;
    const double new_d2 = d2_ - gain * gain / dist2;
    if (!(new_d2 < d2_)) return Rejection::degenerate;

    ComplexMatrix next = rho1_.matrix() * p;
    if (trial.size() == 0) {
        next.noalias() += q * (psi * psi.adjoint());
    } else {
        next.noalias() += q * trial;
    }
    rho1_ = DensityMatrix::trusted(rho1_.dims(), std::move(next));

    s11_ = p * p * s11_ + 2.0 * p * q * t1 + q * q * t2;
    s01_ = p * s01_ + q * t0;
    d2_ = new_d2;
    ++successes_;
    since_success_ = 0;
    if (successes_ % kRefreshInterval == 0) {
        refresh_caches();
    } else {
        delta_ = rho0_.matrix() - rho1_.matrix();
    }
    return TraceRecord{trials_, successes_, d2_};
}

StepOutcome step(RunState& state, StateSampler& sampler) {
    state.count_trials(1);
    return state.consider(sampler.sample_product_vector(state.rho0().dims()));
}

bool halted(const RunState& state, const HaltCriteria& halt) {
    return (halt.max_successes && state.successes() >= *halt.max_successes) ||
           (halt.max_trials && state.trials() >= *halt.max_trials) ||
           (halt.target_d2 && state.d2() <= *halt.target_d2) ||
           (halt.stall_trials && state.trials_since_success() >= *halt.stall_trials);
}

namespace {

struct Candidate {
    std::uint64_t trials = 0;
    std::optional<ComplexVector> psi;
};

std::uint64_t worker_seed(std::uint64_t seed, unsigned worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(worker + 1)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// Persistent workers that scan trials against a read-only RunState between
// two barriers. The coordinating thread never mutates the state while a
// round is in flight.
class SpeculativePool {
   public:
    SpeculativePool(unsigned threads, const SamplerConfig& config)
        : results_(threads), start_(threads + 1), done_(threads + 1) {
        samplers_.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            SamplerConfig c = config;
            c.seed = worker_seed(config.seed, w);
            samplers_.emplace_back(c);
        }
        for (unsigned w = 0; w < threads; ++w) {
            workers_.emplace_back([this, w] { loop(w); });
        }
    }

    ~SpeculativePool() {
        stop_ = true;
        start_.arrive_and_wait();
        for (auto& t : workers_) t.join();
    }

    SpeculativePool(const SpeculativePool&) = delete;
    SpeculativePool& operator=(const SpeculativePool&) = delete;

    const std::vector<Candidate>& round(const RunState& snapshot, std::uint64_t batch,
                                        unsigned active) {
        snapshot_ = &snapshot;
        batch_ = batch;
        active_ = active;
        start_.arrive_and_wait();
        done_.arrive_and_wait();
        return results_;
    }

   private:
    void loop(unsigned w) {
        for (;;) {
            start_.arrive_and_wait();
            if (stop_) return;
            Candidate& out = results_[w];
            out = {};
            if (w < active_) {
                const Dims& dims = snapshot_->rho0().dims();
                while (out.trials < batch_) {
                    ++out.trials;
                    ComplexVector psi = samplers_[w].sample_product_vector(dims);
                    if (snapshot_->preselect_pure(psi) > 0.0) {
                        out.psi = std::move(psi);
                        break;
                    }
                }
            }
            done_.arrive_and_wait();
        }
    }

    std::vector<StateSampler> samplers_;
    std::vector<Candidate> results_;
    std::barrier<> start_;
    std::barrier<> done_;
    const RunState* snapshot_ = nullptr;
    std::uint64_t batch_ = 0;
    unsigned active_ = 0;
    bool stop_ = false;
    std::vector<std::thread> workers_;
};

}  // namespace

RunResult run(const DensityMatrix& rho0, std::optional<DensityMatrix> init,
              std::optional<SymmetryGroup> group, const HaltCriteria& halt,
              const SamplerConfig& sampler_config, const RunOptions& options) {
    halt.validate();
    if (options.threads == 0) throw ParameterError("run: threads must be >= 1");
    if (options.batch == 0) throw ParameterError("run: batch must be >= 1");
    DensityMatrix start = init ? std::move(*init) : DensityMatrix::maximally_mixed(rho0.dims());
    if (start.dims() != rho0.dims()) {
        throw DimensionError("run: initial state dimensions differ from the target");
    }
    if (group) {
        if (group->dims() != rho0.dims()) {
            throw DimensionError("run: symmetry group dimensions differ from the target");
        }
        start = twirl(start, *group);
    }

    const auto t_begin = std::chrono::steady_clock::now();
    RunResult result{RunState(rho0, std::move(start), std::move(group)), {}, 0.0};
    RunState& state = result.state;

    auto record = [&](const StepOutcome& outcome) {
        if (const auto* rec = std::get_if<TraceRecord>(&outcome)) {
            result.trace.push_back(*rec);
            if (options.on_success) options.on_success(state, *rec);
        }
    };

    if (options.threads == 1) {
        StateSampler sampler(sampler_config);
        while (!halted(state, halt)) record(step(state, sampler));
    } else {
        SpeculativePool pool(options.threads, sampler_config);
        while (!halted(state, halt)) {
            // Never overshoot a trial budget: shrink the round so that the
            // trials it can consume fit in what is left.
            std::uint64_t remaining = UINT64_MAX;
            if (halt.max_trials) remaining = *halt.max_trials - state.trials();
            if (halt.stall_trials) {
                remaining = std::min(remaining, *halt.stall_trials - state.trials_since_success());
            }
            unsigned active = options.threads;
            std::uint64_t batch = options.batch;
            if (remaining < active) {
                active = static_cast<unsigned>(remaining);
                batch = 1;
            } else {
                batch = std::min(batch, remaining / active);
            }
            for (const Candidate& c : pool.round(state, batch, active)) {
                if (c.trials == 0) continue;
                state.count_trials(c.trials);
                if (c.psi) record(state.consider(*c.psi));
                if (halted(state, halt)) break;
            }
        }
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

}  // namespace hsd
