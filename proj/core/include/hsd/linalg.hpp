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

// Dense complex Hermitian kernel. Subsystem indices are row-major: the first
// party is the most significant digit, matching kron(A, B) ordering.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hsd/errors.hpp"

namespace hsd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kNorm = 1e-12;
}  // namespace tolerance

/// Product of subsystem dimensions. Throws DimensionError for an empty list
/// or any dimension < 2.
int total_dim(const Dims& dims);

/// max |M(i,j) - conj(M(j,i))|; infinity for non-square input.
double hermitian_defect(const ComplexMatrix& m);

/// Unit-norm state vector of a single system or a flattened product.
class PureState {
   public:
    explicit PureState(ComplexVector amplitudes);

    static PureState basis(int dim, int index);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    ComplexMatrix projector() const;

   private:
    ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix over `dims`.
class DensityMatrix {
   public:
    /// Validates all three invariants; throws ValidationError or
    /// DimensionError.
    DensityMatrix(Dims dims, ComplexMatrix matrix);

    /// Skips the spectral checks. Only for matrices that are density
    /// matrices by construction (convex mixtures, twirls of valid states).
    static DensityMatrix trusted(Dims dims, ComplexMatrix matrix);

    static DensityMatrix maximally_mixed(Dims dims);
    static DensityMatrix from_pure(Dims dims, const PureState& psi);

    const Dims& dims() const { return dims_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    std::size_t parties() const { return dims_.size(); }

    double purity() const;

   private:
    struct TrustedTag {};
    DensityMatrix(Dims dims, ComplexMatrix matrix, TrustedTag);

    Dims dims_;
    ComplexMatrix matrix_;
};

/// Tr[A B] for Hermitian A, B.
double hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr[(A - B)^2] for Hermitian operators of equal shape.
double hs_distance_sq(const ComplexMatrix& a, const ComplexMatrix& b);

/// Squared Hilbert-Schmidt distance between density matrices on the same
/// subsystem structure.
double hsd_sq(const DensityMatrix& a, const DensityMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

struct Eigensystem {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // orthonormal columns
};

Eigensystem eig_hermitian(const ComplexMatrix& m);
RealVector eigenvalues_hermitian(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);

/// Effective operator on the remaining parties after sandwiching `party`
/// between <b| and |b>:  <a|M_b|a> = <a (x) b|M|a (x) b>.
ComplexMatrix contract_party(const ComplexMatrix& m, std::size_t party,
                             const PureState& state, const Dims& dims);

/// Transpose of the indices belonging to `party`.
ComplexMatrix partial_transpose(const ComplexMatrix& m, const Dims& dims,
                                std::size_t party);
ComplexMatrix partial_transpose(const DensityMatrix& rho, std::size_t party);

/// Smallest eigenvalue of the partial transpose over every bipartition of
/// the parties. Non-negative (up to noise) for separable states.
double min_ppt_eigenvalue(const DensityMatrix& rho);

}  // namespace hsd
