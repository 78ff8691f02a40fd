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
#include <variant>
#include <vector>

#include "hsd/linalg.hpp"

namespace hsd {

/// Permutation of equal-dimension parties: output party j carries input
/// party order[j].
struct PartyPermutation {
    std::vector<std::size_t> order;
};

/// Tensor product of per-party unitaries, one factor per party.
struct LocalUnitary {
    std::vector<ComplexMatrix> factors;
};

// Only separability-preserving kinds are representable; arbitrary global
// unitaries cannot be used to build a group.
using SymmetryGenerator = std::variant<PartyPermutation, LocalUnitary>;

/// Full D x D unitary of a generator over `dims`.
ComplexMatrix generator_matrix(const SymmetryGenerator& generator, const Dims& dims);

/// Finite group of separability-preserving unitaries, identity included.
/// Elements that differ only by a global phase are stored once.
class SymmetryGroup {
   public:
    static SymmetryGroup trivial(const Dims& dims);

    const Dims& dims() const { return dims_; }
    const std::vector<ComplexMatrix>& elements() const { return elements_; }
    std::size_t order() const { return elements_.size(); }

   private:
    friend SymmetryGroup closure(std::span<const SymmetryGenerator>, const Dims&, std::size_t);
    SymmetryGroup(Dims dims, std::vector<ComplexMatrix> elements);

    Dims dims_;
    std::vector<ComplexMatrix> elements_;
};

inline constexpr std::size_t kDefaultGroupCap = 1024;

/// Multiplicative closure of the generators. Throws ValidationError for a
/// non-unitary or malformed generator, CapacityError when the group would
/// exceed `cap` elements.
SymmetryGroup closure(std::span<const SymmetryGenerator> generators, const Dims& dims,
                      std::size_t cap = kDefaultGroupCap);

/// (1/k) sum_U U rho U^dagger.
DensityMatrix twirl(const DensityMatrix& rho, const SymmetryGroup& group);
ComplexMatrix twirl(const ComplexMatrix& m, const SymmetryGroup& group);

/// max_U hsd_sq(rho, U rho U^dagger). Values above 1e-10 mean the group is
/// not a symmetry of rho.
double invariance_check(const DensityMatrix& rho, const SymmetryGroup& group);

}  // namespace hsd
