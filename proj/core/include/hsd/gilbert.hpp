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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "hsd/linalg.hpp"
#include "hsd/states.hpp"
#include "hsd/symmetry.hpp"

namespace hsd {

/// Stop conditions for run(); the loop halts as soon as any set field is
/// met. At least one must be set.
struct HaltCriteria {
    std::optional<std::uint64_t> max_successes;  // c_s bound
    std::optional<std::uint64_t> max_trials;     // c_t bound
    std::optional<double> target_d2;             // halt once d2 <= target
    std::optional<std::uint64_t> stall_trials;   // trials since last success

    void validate() const;
};

struct TraceRecord {
    std::uint64_t c_t = 0;
    std::uint64_t c_s = 0;
    double d2 = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// One record per accepted correction, in acceptance order.
using Trace = std::vector<TraceRecord>;

enum class Rejection { preselect_failed, p_out_of_range, degenerate };

using StepOutcome = std::variant<TraceRecord, Rejection>;

/// Tr[(rho2 - rho1)(rho0 - rho1)]. A positive value guarantees that mixing
/// in rho2 strictly decreases the distance to rho0.
double preselect(const DensityMatrix& rho0, const DensityMatrix& rho1, const DensityMatrix& rho2);

struct LineSearch {
    double p = 0.0;            // clamped to [0, 1]
    double p_unclamped = 0.0;  // exact minimizer of the quadratic
    double new_d2 = 0.0;       // hsd_sq(rho0, p rho1 + (1 - p) rho2)
};

/// Exact minimizer over p of Tr(rho0 - p rho1 - (1 - p) rho2)^2. Throws
/// DegenerateError when rho1 and rho2 coincide.
LineSearch optimal_p(const DensityMatrix& rho0, const DensityMatrix& rho1,
                     const DensityMatrix& rho2);

/// Current Gilbert iterate. rho1 only ever changes by convex mixing with
/// product states (or their twirls), so it stays separable.
class RunState {
   public:
    RunState(DensityMatrix rho0, DensityMatrix rho1, std::optional<SymmetryGroup> group = {});

    const DensityMatrix& rho0() const { return rho0_; }
    const DensityMatrix& rho1() const { return rho1_; }
    const std::optional<SymmetryGroup>& group() const { return group_; }

    std::uint64_t trials() const { return trials_; }
    std::uint64_t successes() const { return successes_; }
    std::uint64_t trials_since_success() const { return since_success_; }
    double d2() const { return d2_; }

    /// d2 recomputed from the matrices instead of the running expansion.
    double recomputed_d2() const;

    /// Preselection value of a pure trial vector against the current rho1.
    double preselect_pure(const ComplexVector& psi) const;

    /// Counts `trials` consumed trials without a candidate.
    void count_trials(std::uint64_t trials);

    /// Evaluates a trial that has already been counted: preselection, twirl
    /// (when a group is attached) with re-check, line search, update.
    StepOutcome consider(const ComplexVector& psi);

   private:
    void refresh_caches();

    DensityMatrix rho0_;
    DensityMatrix rho1_;
    std::optional<SymmetryGroup> group_;
    ComplexMatrix delta_;  // rho0 - rho1
    double s00_ = 0.0;     // Tr rho0^2
    double s01_ = 0.0;     // Tr rho0 rho1
    double s11_ = 0.0;     // Tr rho1^2
    double d2_ = 0.0;
    std::uint64_t trials_ = 0;
    std::uint64_t successes_ = 0;
    std::uint64_t since_success_ = 0;
};

/// Draws one product trial state and processes it. Always increments c_t.
StepOutcome step(RunState& state, StateSampler& sampler);

bool halted(const RunState& state, const HaltCriteria& halt);

struct RunOptions {
    // 1 runs the strictly sequential, seed-reproducible loop. More threads
    // draw and preselect trials speculatively against a snapshot of rho1;
    // acceptance stays serialized and re-verifies preselection.
    unsigned threads = 1;
    // Trials each speculative worker may scan per round.
    std::uint64_t batch = 512;
    // Called after every accepted correction.
    std::function<void(const RunState&, const TraceRecord&)> on_success;
};

struct RunResult {
    RunState state;
    Trace trace;
    double wall_seconds = 0.0;
};

/// Iterates until `halt` fires. The default initial iterate is I/D. With a
/// group attached the initial iterate is twirled once before the loop.
RunResult run(const DensityMatrix& rho0, std::optional<DensityMatrix> init,
              std::optional<SymmetryGroup> group, const HaltCriteria& halt,
              const SamplerConfig& sampler, const RunOptions& options = {});

}  // namespace hsd
