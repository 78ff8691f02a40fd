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

#include "hsd/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace hsd {
namespace {

constexpr double kUnitarity = 1e-10;
constexpr double kSameElement = 1e-9;

bool is_unitary(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return false;
    const auto n = u.rows();
    return (u * u.adjoint() - ComplexMatrix::Identity(n, n)).norm() <= kUnitarity;
}

// Equal up to a unit-modulus scalar.
bool same_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Complex overlap = (a.adjoint() * b).trace();
    const double mag = std::abs(overlap);
    if (mag == 0.0) return false;
    return (a * (overlap / mag) - b).norm() <= kSameElement;
}

ComplexMatrix permutation_matrix(const PartyPermutation& perm, const Dims& dims) {
    const auto& order = perm.order;
    if (order.size() != dims.size()) {
        throw ValidationError("party permutation length does not match the number of parties");
    }
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(order.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    if (sorted != expected) throw ValidationError("party permutation is not a permutation");
    for (std::size_t j = 0; j < order.size(); ++j) {
        if (dims[order[j]] != dims[j]) {
            throw ValidationError("party permutation mixes parties of different dimension");
        }
    }

    const int n = total_dim(dims);
    const std::size_t parties = dims.size();
    std::vector<int> strides(parties, 1);
    for (std::size_t j = parties; j-- > 1;) strides[j - 1] = strides[j] * dims[j];

    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    for (int in = 0; in < n; ++in) {
        int out = 0;
        for (std::size_t j = 0; j < parties; ++j) {
            const int digit = (in / strides[order[j]]) % dims[order[j]];
            out += digit * strides[j];
        }
        p(out, in) = 1.0;
    }
    return p;
}

ComplexMatrix local_matrix(const LocalUnitary& local, const Dims& dims) {
    if (local.factors.size() != dims.size()) {
        throw ValidationError("local unitary needs one factor per party");
    }
    ComplexMatrix out;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        const ComplexMatrix& f = local.factors[j];
        if (f.rows() != dims[j] || f.cols() != dims[j]) {
            throw ValidationError("local unitary factor has the wrong dimension");
        }
        if (!is_unitary(f)) throw ValidationError("local unitary factor is not unitary");
        out = j == 0 ? f : kron(out, f);
    }
    return out;
}

}  // namespace

ComplexMatrix generator_matrix(const SymmetryGenerator& generator, const Dims& dims) {
    total_dim(dims);
    return std::visit(
        [&](const auto& g) -> ComplexMatrix {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, PartyPermutation>) {
                return permutation_matrix(g, dims);
            } else {
                return local_matrix(g, dims);
            }
        },
        generator);
}

SymmetryGroup::SymmetryGroup(Dims dims, std::vector<ComplexMatrix> elements)
    : dims_(std::move(dims)), elements_(std::move(elements)) {}

SymmetryGroup SymmetryGroup::trivial(const Dims& dims) {
    const int n = total_dim(dims);
    return SymmetryGroup(dims, {ComplexMatrix::Identity(n, n)});
}

SymmetryGroup closure(std::span<const SymmetryGenerator> generators, const Dims& dims,
                      std::size_t cap) {
    if (cap < 1) throw ParameterError("closure: cap must be >= 1");
    const int n = total_dim(dims);

    std::vector<ComplexMatrix> gens;
    for (const auto& g : generators) {
        ComplexMatrix u = generator_matrix(g, dims);
        if (!is_unitary(u)) throw ValidationError("closure: generator is not unitary");
        gens.push_back(std::move(u));
    }

    std::vector<ComplexMatrix> elements{ComplexMatrix::Identity(n, n)};
    auto known = [&](const ComplexMatrix& u) {
        return std::any_of(elements.begin(), elements.end(),
                           [&](const ComplexMatrix& e) { return same_up_to_phase(e, u); });
    };

    // Breadth-first: every element is a word in the generators, so
    // left-multiplying each new element by every generator reaches the group.
    std::deque<std::size_t> frontier{0};
    while (!frontier.empty()) {
        const ComplexMatrix current = elements[frontier.front()];
        frontier.pop_front();
        for (const auto& g : gens) {
            ComplexMatrix next = g * current;
            if (known(next)) continue;
            if (elements.size() >= cap) {
                throw CapacityError("closure: group order exceeds cap " + std::to_string(cap));
            }
            elements.push_back(std::move(next));
            frontier.push_back(elements.size() - 1);
        }
    }
    return SymmetryGroup(dims, std::move(elements));
}

ComplexMatrix twirl(const ComplexMatrix& m, const SymmetryGroup& group) {
    const int n = total_dim(group.dims());
    if (m.rows() != n || m.cols() != n) throw DimensionError("twirl: matrix size mismatch");
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (const auto& u : group.elements()) acc.noalias() += u * m * u.adjoint();
    return acc / static_cast<double>(group.order());
}

DensityMatrix twirl(const DensityMatrix& rho, const SymmetryGroup& group) {
    if (rho.dims() != group.dims()) throw DimensionError("twirl: subsystem dimensions differ");
    ComplexMatrix out = twirl(rho.matrix(), group);
    // Restore exact Hermiticity lost to rounding in the products.
    out = (out + out.adjoint()).eval() / 2.0;
    return DensityMatrix::trusted(rho.dims(), std::move(out));
}

double invariance_check(const DensityMatrix& rho, const SymmetryGroup& group) {
    if (rho.dims() != group.dims()) {
        throw DimensionError("invariance_check: subsystem dimensions differ");
    }
    double worst = 0.0;
    for (const auto& u : group.elements()) {
        const ComplexMatrix moved = u * rho.matrix() * u.adjoint();
        worst = std::max(worst, (rho.matrix() - moved).squaredNorm());
    }
    return worst;
}

}  // namespace hsd
