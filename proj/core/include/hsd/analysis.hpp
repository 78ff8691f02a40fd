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

#include <cstddef>
#include <span>
#include <vector>

#include "hsd/gilbert.hpp"
#include "hsd/linalg.hpp"
#include "hsd/states.hpp"

namespace hsd {

/// Pearson sample correlation. Throws ParameterError on length mismatch or
/// fewer than two points, DegenerateError on zero variance.
double correlation(std::span<const double> x, std::span<const double> y);

/// Fit of d2 against c_s to the model |ln(d2 - a)|^b linear in c_s; `a`
/// estimates the limit of d2.
struct ExtrapolationFit {
    double a = 0.0;
    double b = 0.0;
    double r = 0.0;
    std::size_t stride = 0;
    std::size_t points = 0;
};

inline constexpr std::size_t kDefaultStride = 100;
inline constexpr std::size_t kMinFitPoints = 10;

/// Maximizes the correlation between c_s and |ln(d2 - a)|^b over
/// a in [0, min d2) and b in [1, 20], using the records whose c_s is a
/// multiple of `stride`. A weak fit (r <= 0.9) is reported, not thrown.
ExtrapolationFit fit_extrapolation(const Trace& trace, std::size_t stride = kDefaultStride);

/// Same objective on raw (c_s, d2) columns.
ExtrapolationFit fit_extrapolation(std::span<const double> c_s, std::span<const double> d2,
                                   std::size_t stride);

/// c_s = c * c_t^f by least squares in log-log space.
struct PowerFit {
    double f = 0.0;
    double c = 0.0;
    double r2 = 0.0;
};

PowerFit fit_power(const Trace& trace);

struct Diagnostics {
    double commutator_norm = 0.0;  // ||[rho0, rho1]||_F
    RealVector spectrum0;          // ascending
    RealVector spectrum1;          // ascending
    double spectral_d2 = 0.0;      // sum_i (lambda_i(rho0) - lambda_i(rho1))^2
};

Diagnostics diagnostics(const DensityMatrix& rho0, const DensityMatrix& rho1);

struct SeparableOverlap {
    double lambda = 0.0;
    std::vector<PureState> factors;  // one per party
};

inline constexpr int kDefaultRestarts = 64;

/// Lower bound on max <phi|M|phi> over pure product states by alternating
/// best response: each party in turn takes the top eigenvector of M
/// contracted with the other factors. Best of `restarts` random starts; ties
/// go to the lowest restart index.
SeparableOverlap max_sep_overlap(const ComplexMatrix& m, const Dims& dims, int restarts,
                                 StateSampler& sampler);

struct Witness {
    ComplexMatrix op;          // (rho0 - rho1) - lambda I
    double lambda = 0.0;       // separable maximum of rho0 - rho1
    double value_rho0 = 0.0;   // Tr[rho0 (rho0 - rho1)]
    Dims dims;
    std::vector<PureState> argmax;

    bool entangled() const { return value_rho0 > lambda; }
    double margin() const { return value_rho0 - lambda; }
};

Witness build_witness(const DensityMatrix& rho0, const DensityMatrix& rho1, int restarts,
                      StateSampler& sampler);

}  // namespace hsd
