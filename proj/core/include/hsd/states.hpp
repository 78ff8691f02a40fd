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

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

#include "hsd/linalg.hpp"

namespace hsd {

enum class SamplingMode { complex, real };

// How normal deviates are produced: the standard library's normal
// distribution, or the polar form e^{2 pi i x1} sqrt(-2 ln x2) built from
// uniform variates.
enum class GaussianSource { gaussian, box_muller };

struct SamplerConfig {
    // Real sampling is opt-in: restricting trials to real product states
    // converges to the wrong limit for real targets such as the Bell state.
    SamplingMode mode = SamplingMode::complex;
    std::uint64_t seed = 0;
    GaussianSource source = GaussianSource::gaussian;
};

/// Unnormalized complex amplitude e^{2 pi i x1} sqrt(-2 ln x2).
Complex box_muller_amplitude(double x1, double x2);

/// Draws unitarily invariant (Hilbert-Schmidt measure) pure states and pure
/// product states. Owns its random stream; not thread-safe.
class StateSampler {
   public:
    explicit StateSampler(SamplerConfig config);

    const SamplerConfig& config() const { return config_; }

    PureState sample_pure(int d);

    /// Flattened |psi_1> (x) |psi_2> (x) ... with independent factors.
    ComplexVector sample_product_vector(const Dims& dims);

    DensityMatrix sample_product(const Dims& dims);

    /// Uniform in (0, 1].
    double uniform_open_closed();

    std::mt19937_64& engine() { return engine_; }

   private:
    void fill_amplitudes(ComplexVector& v);

    SamplerConfig config_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// |phi_d><phi_d| with |phi_d> = sum_i |i,i> / sqrt(d), dims (d, d).
DensityMatrix max_entangled(int d);

/// Bell state, the d = 2 maximally entangled state.
DensityMatrix bell();

/// Closest separable state of max_entangled(d): weight 1/(d+1) on the
/// maximally entangled projector, d/(d+1) on white noise.
DensityMatrix css_max_entangled(int d);

/// (d - 1) / (d + 1).
double max_entangled_distance_sq(int d);

/// (|0...0> + |1...1>) / sqrt(2) on N qubits.
DensityMatrix ghz(int parties);

/// Mixing weight x_N between the corner-diagonal and dephased components of
/// the GHZ closest separable state.
double ghz_css_weight(int parties);

DensityMatrix css_ghz(int parties);

/// Closed-form squared distance of ghz(N) from the separable set.
double ghz_distance_sq(int parties);

/// The five orthonormal product vectors of the two-qutrit Tiles UPB.
std::array<ComplexVector, 5> upb_tiles_vectors();

/// (I - sum_i |psi_i><psi_i|) / 4 over the Tiles basis; PPT and entangled.
DensityMatrix upb_tiles_state();

/// Limit reached by the Bell-state run when only real trial states are
/// drawn: (1/8)[[3,0,0,1],[0,1,1,0],[0,1,1,0],[1,0,0,3]].
DensityMatrix real_limit_bell();

/// Resolves the named-state grammar: bell, max_entangled:d, ghz:N,
/// ghz_css:N, max_entangled_css:d, upb_tiles, real_limit_bell. Throws
/// ParameterError for unknown names or malformed arguments.
DensityMatrix named_state(std::string_view spec);

bool is_named_state(std::string_view spec);

}  // namespace hsd
