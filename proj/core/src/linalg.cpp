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

#include "hsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hsd {
namespace {

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
    }
}

void require_hermitian(const ComplexMatrix& m, const char* what) {
    require_square(m, what);
    if (hermitian_defect(m) > tolerance::kHermitian) {
        throw ValidationError(std::string(what) + ": matrix is not Hermitian");
    }
}

std::vector<int> strides_of(const Dims& dims) {
    std::vector<int> strides(dims.size(), 1);
    for (std::size_t j = dims.size(); j-- > 1;) {
        strides[j - 1] = strides[j] * dims[j];
    }
    return strides;
}

// Transposes every party whose bit is set in `mask`.
ComplexMatrix transpose_parties(const ComplexMatrix& m, const Dims& dims, unsigned mask) {
    const int n = m.rows();
    const auto strides = strides_of(dims);
    ComplexMatrix out(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            int r2 = r;
            int c2 = c;
            for (std::size_t j = 0; j < dims.size(); ++j) {
                if (!(mask & (1u << j))) continue;
                const int dr = (r / strides[j]) % dims[j];
                const int dc = (c / strides[j]) % dims[j];
                r2 += (dc - dr) * strides[j];
                c2 += (dr - dc) * strides[j];
            }
            out(r2, c2) = m(r, c);
        }
    }
    return out;
}

}  // namespace

int total_dim(const Dims& dims) {
    if (dims.empty()) throw DimensionError("subsystem dimension list is empty");
    long long total = 1;
    for (int d : dims) {
        if (d < 2) throw DimensionError("subsystem dimensions must be >= 2");
        total *= d;
        if (total > std::numeric_limits<int>::max()) {
            throw DimensionError("total dimension overflows");
        }
    }
    return static_cast<int>(total);
}

double hermitian_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i; j < m.cols(); ++j) {
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return worst;
}

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) throw DimensionError("pure state has no amplitudes");
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > tolerance::kNorm) {
        throw ValidationError("pure state is not normalized");
    }
}

PureState PureState::basis(int dim, int index) {
    if (dim < 1 || index < 0 || index >= dim) {
        throw DimensionError("basis index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
}

ComplexMatrix PureState::projector() const {
    return amplitudes_ * amplitudes_.adjoint();
}

DensityMatrix::DensityMatrix(Dims dims, ComplexMatrix matrix, TrustedTag)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
    const int n = total_dim(dims_);
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw DimensionError("density matrix size does not match subsystem dimensions");
    }
}

DensityMatrix::DensityMatrix(Dims dims, ComplexMatrix matrix)
    : DensityMatrix(std::move(dims), std::move(matrix), TrustedTag{}) {
    if (hermitian_defect(matrix_) > tolerance::kHermitian) {
        throw ValidationError("density matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0)) > tolerance::kTrace) {
        throw ValidationError("density matrix trace differs from 1");
    }
    if (min_eigenvalue(matrix_) < -tolerance::kPsd) {
        throw ValidationError("density matrix is not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::trusted(Dims dims, ComplexMatrix matrix) {
    return DensityMatrix(std::move(dims), std::move(matrix), TrustedTag{});
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
    const int n = total_dim(dims);
    return trusted(std::move(dims), ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix DensityMatrix::from_pure(Dims dims, const PureState& psi) {
    if (psi.dim() != total_dim(dims)) {
        throw DimensionError("pure state size does not match subsystem dimensions");
    }
    return trusted(std::move(dims), psi.projector());
}

double DensityMatrix::purity() const { return hs_inner(matrix_, matrix_); }

double hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_hermitian(a, "hs_inner");
    require_hermitian(b, "hs_inner");
    if (a.rows() != b.rows()) throw DimensionError("hs_inner: shape mismatch");
    // Tr[AB] = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
    return (a.array() * b.conjugate().array()).sum().real();
}

double hs_distance_sq(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_hermitian(a, "hs_distance_sq");
    require_hermitian(b, "hs_distance_sq");
    if (a.rows() != b.rows()) throw DimensionError("hs_distance_sq: shape mismatch");
    return (a - b).squaredNorm();
}

double hsd_sq(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dims() != b.dims()) throw DimensionError("hsd_sq: subsystem dimensions differ");
    return (a.matrix() - b.matrix()).squaredNorm();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

Eigensystem eig_hermitian(const ComplexMatrix& m) {
    require_hermitian(m, "eig_hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ValidationError("eig_hermitian: eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector eigenvalues_hermitian(const ComplexMatrix& m) {
    require_hermitian(m, "eigenvalues_hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ValidationError("eigenvalues_hermitian: eigendecomposition failed");
    }
    return solver.eigenvalues();
}

double min_eigenvalue(const ComplexMatrix& m) { return eigenvalues_hermitian(m)(0); }

ComplexMatrix contract_party(const ComplexMatrix& m, std::size_t party, const PureState& state,
                             const Dims& dims) {
    const int n = total_dim(dims);
    if (dims.size() < 2) throw DimensionError("contract_party: need at least two parties");
    if (party >= dims.size()) throw DimensionError("contract_party: party index out of range");
    if (m.rows() != n || m.cols() != n) throw DimensionError("contract_party: matrix size mismatch");
    const int dp = dims[party];
    if (state.dim() != dp) throw DimensionError("contract_party: state dimension mismatch");

    const int stride = strides_of(dims)[party];
    const int rest = n / dp;
    // Full index of (remaining index r, party digit k): split r around the
    // party's position and reinsert k.
    auto full = [&](int r, int k) {
        const int low = r % stride;
        const int high = r / stride;
        return (high * dp + k) * stride + low;
    };
    const ComplexVector& b = state.amplitudes();
    ComplexMatrix out = ComplexMatrix::Zero(rest, rest);
    for (int r = 0; r < rest; ++r) {
        for (int c = 0; c < rest; ++c) {
            Complex acc = 0.0;
            for (int k = 0; k < dp; ++k) {
                const Complex bk = std::conj(b(k));
                for (int l = 0; l < dp; ++l) {
                    acc += bk * m(full(r, k), full(c, l)) * b(l);
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const Dims& dims, std::size_t party) {
    const int n = total_dim(dims);
    if (party >= dims.size()) throw DimensionError("partial_transpose: party index out of range");
    if (m.rows() != n || m.cols() != n) throw DimensionError("partial_transpose: matrix size mismatch");
    return transpose_parties(m, dims, 1u << party);
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, std::size_t party) {
    return partial_transpose(rho.matrix(), rho.dims(), party);
}

double min_ppt_eigenvalue(const DensityMatrix& rho) {
    const auto& dims = rho.dims();
    if (dims.size() > 16) throw DimensionError("min_ppt_eigenvalue: too many parties");
    // Subsets without party 0 cover every cut once; the complement gives the
    // full transpose of the same operator, which has the same spectrum.
    double worst = std::numeric_limits<double>::infinity();
    const unsigned subsets = 1u << (dims.size() - 1);
    for (unsigned s = 1; s < subsets; ++s) {
        worst = std::min(worst, min_eigenvalue(transpose_parties(rho.matrix(), dims, s << 1)));
    }
    if (dims.size() == 1) worst = min_eigenvalue(rho.matrix());
    return worst;
}

}  // namespace hsd
