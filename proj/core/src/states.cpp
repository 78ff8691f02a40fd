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

#include "hsd/states.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace hsd {

Complex box_muller_amplitude(double x1, double x2) {
    return std::polar(std::sqrt(-2.0 * std::log(x2)), 2.0 * std::numbers::pi * x1);
}

StateSampler::StateSampler(SamplerConfig config) : config_(config), engine_(config.seed) {}

double StateSampler::uniform_open_closed() {
    // 53 random bits -> [0, 1), reflected to (0, 1] so log(x) stays finite.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 1.0 - u;
}

void StateSampler::fill_amplitudes(ComplexVector& v) {
    const bool real = config_.mode == SamplingMode::real;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (config_.source == GaussianSource::gaussian) {
            const double re = normal_(engine_);
            v(i) = real ? Complex(re, 0.0) : Complex(re, normal_(engine_));
        } else {
            const double x1 = 1.0 - uniform_open_closed();
            const double x2 = uniform_open_closed();
            const Complex z = box_muller_amplitude(x1, x2);
            v(i) = real ? Complex(z.real(), 0.0) : z;
        }
    }
    const double norm = v.norm();
    if (norm == 0.0) {
        // All deviates vanished (probability zero); fall back to a basis vector.
        v.setZero();
        v(0) = 1.0;
        return;
    }
    v /= norm;
}

PureState StateSampler::sample_pure(int d) {
    if (d < 2) throw ParameterError("sample_pure: dimension must be >= 2");
    ComplexVector v(d);
    fill_amplitudes(v);
    return PureState(std::move(v));
}

ComplexVector StateSampler::sample_product_vector(const Dims& dims) {
    total_dim(dims);
    ComplexVector out;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        ComplexVector factor(dims[j]);
        fill_amplitudes(factor);
        out = j == 0 ? factor : kron(out, factor);
    }
    return out;
}

DensityMatrix StateSampler::sample_product(const Dims& dims) {
    const ComplexVector v = sample_product_vector(dims);
    return DensityMatrix::trusted(dims, v * v.adjoint());
}

namespace {

void require_at_least_two(int n, const char* what) {
    if (n < 2) throw ParameterError(std::string(what) + ": argument must be >= 2");
}

}  // namespace

DensityMatrix max_entangled(int d) {
    require_at_least_two(d, "max_entangled");
    // Entries 1/d written directly; the outer product of the 1/sqrt(d)
    // amplitudes would round them.
    const int n = d * d;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / d;
    }
    return DensityMatrix::trusted({d, d}, std::move(m));
}

DensityMatrix bell() { return max_entangled(2); }

DensityMatrix css_max_entangled(int d) {
    require_at_least_two(d, "css_max_entangled");
    // Entry-wise rationals over d(d+1), each rounded once, so the result is
    // the correctly rounded closed form.
    const int n = d * d;
    const double den = static_cast<double>(d) * (d + 1);
    ComplexMatrix m = ComplexMatrix::Identity(n, n) * (1.0 / den);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = (i == j ? 2.0 : 1.0) / den;
    }
    return DensityMatrix::trusted({d, d}, std::move(m));
}

double max_entangled_distance_sq(int d) {
    require_at_least_two(d, "max_entangled_distance_sq");
    return static_cast<double>(d - 1) / (d + 1);
}

DensityMatrix ghz(int parties) {
    require_at_least_two(parties, "ghz");
    if (parties > 12) throw ParameterError("ghz: too many parties for dense storage");
    const int n = 1 << parties;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(0, 0) = m(0, n - 1) = m(n - 1, 0) = m(n - 1, n - 1) = 0.5;
    return DensityMatrix::trusted(Dims(parties, 2), std::move(m));
}

double ghz_css_weight(int parties) {
    require_at_least_two(parties, "ghz_css_weight");
    const double two_n = std::ldexp(1.0, parties);
    return (two_n - 2.0) * (two_n - 2.0) / (4.0 + two_n * two_n - 2.0 * two_n);
}

DensityMatrix css_ghz(int parties) {
    require_at_least_two(parties, "css_ghz");
    if (parties > 12) throw ParameterError("css_ghz: too many parties for dense storage");
    // x sigma_1 + (1 - x) sigma_2 with x = num / den, written entry-wise over
    // the common denominator den * 2^N so each entry is rounded once.
    const int n = 1 << parties;
    const double two_n = n;
    const double num = (two_n - 2.0) * (two_n - 2.0);
    const double den = 4.0 + two_n * two_n - 2.0 * two_n;
    const double common = den * two_n;
    ComplexMatrix m = ComplexMatrix::Identity(n, n) * ((den - num) / common);
    m(0, n - 1) = m(n - 1, 0) = (den - num) / common;
    m(0, 0) = m(n - 1, n - 1) = (num * two_n / 2.0 + (den - num)) / common;
    return DensityMatrix::trusted(Dims(parties, 2), std::move(m));
}

double ghz_distance_sq(int parties) {
    require_at_least_two(parties, "ghz_distance_sq");
    const double two_n = std::ldexp(1.0, parties);
    return (two_n - 2.0) / (-4.0 + std::ldexp(1.0, 3 - parties) + 2.0 * two_n);
}

std::array<ComplexVector, 5> upb_tiles_vectors() {
    auto ket = [](std::initializer_list<double> amps) {
        ComplexVector v(static_cast<Eigen::Index>(amps.size()));
        Eigen::Index i = 0;
        for (double a : amps) v(i++) = a;
        return v;
    };
    const double h = 1.0 / std::sqrt(2.0);
    const ComplexVector e0 = ket({1, 0, 0});
    const ComplexVector e2 = ket({0, 0, 1});
    const ComplexVector m01 = ket({h, -h, 0});
    const ComplexVector m12 = ket({0, h, -h});
    const ComplexVector plus = ket({1, 1, 1}) / std::sqrt(3.0);
    return {kron(e0, m01), kron(e2, m12), kron(m01, e2), kron(m12, e0), kron(plus, plus)};
}

DensityMatrix upb_tiles_state() {
    ComplexMatrix m = ComplexMatrix::Identity(9, 9);
    for (const auto& v : upb_tiles_vectors()) m -= v * v.adjoint();
    return DensityMatrix::trusted({3, 3}, m / 4.0);
}

DensityMatrix real_limit_bell() {
    ComplexMatrix m(4, 4);
    m << 3, 0, 0, 1,
         0, 1, 1, 0,
         0, 1, 1, 0,
         1, 0, 0, 3;
    return DensityMatrix::trusted({2, 2}, m / 8.0);
}

namespace {

int parse_argument(std::string_view text, std::string_view spec) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ParameterError("malformed state argument in '" + std::string(spec) + "'");
    }
    return value;
}

}  // namespace

DensityMatrix named_state(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    const bool has_arg = colon != std::string_view::npos;
    const auto argument = [&] {
        if (!has_arg) throw ParameterError("state '" + std::string(name) + "' needs an argument");
        return parse_argument(spec.substr(colon + 1), spec);
    };
    const auto no_argument = [&] {
        if (has_arg) throw ParameterError("state '" + std::string(name) + "' takes no argument");
    };

    if (name == "bell") {
        no_argument();
        return bell();
    }
    if (name == "upb_tiles") {
        no_argument();
        return upb_tiles_state();
    }
    if (name == "real_limit_bell") {
        no_argument();
        return real_limit_bell();
    }
    if (name == "max_entangled") return max_entangled(argument());
    if (name == "max_entangled_css") return css_max_entangled(argument());
    if (name == "ghz") return ghz(argument());
    if (name == "ghz_css") return css_ghz(argument());
    throw ParameterError("unknown state name '" + std::string(spec) + "'");
}

bool is_named_state(std::string_view spec) {
    const std::string_view name = spec.substr(0, spec.find(':'));
    return name == "bell" || name == "upb_tiles" || name == "real_limit_bell" ||
           name == "max_entangled" || name == "max_entangled_css" || name == "ghz" ||
           name == "ghz_css";
}

}  // namespace hsd
