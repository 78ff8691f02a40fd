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

#include "hsd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsd {

double correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ParameterError("correlation: length mismatch");
    if (x.size() < 2) throw ParameterError("correlation: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateError("correlation: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

constexpr double kBMin = 1.0;
constexpr double kBMax = 20.0;
constexpr int kGridA = 200;
constexpr int kGridB = 96;
constexpr double kStepTolerance = 1e-9;
constexpr int kMaxEvaluations = 200000;

// Correlation between x and |ln(d2 - a)|^b as a function of (u, b) with
// a = u * min(d2). Outside the admissible box the objective is -inf.
class ExtrapolationObjective {
   public:
    ExtrapolationObjective(std::span<const double> x, std::span<const double> d2)
        : x_(x), d2_(d2), m_(*std::min_element(d2.begin(), d2.end())), y_(d2.size()) {}

    double floor() const { return m_; }

    double operator()(double u, double b) {
        if (!(u >= 0.0) || !(u < 1.0) || b < kBMin || b > kBMax) return -kInf;
        const double a = u * m_;
        for (std::size_t i = 0; i < d2_.size(); ++i) {
            const double gap = d2_[i] - a;
            if (!(gap > 0.0)) return -kInf;
            y_[i] = std::pow(std::abs(std::log(gap)), b);
        }
        try {
            const double r = correlation(x_, y_);
            return std::isfinite(r) ? r : -kInf;
        } catch (const DegenerateError&) {
            return -kInf;
        }
    }

   private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    std::span<const double> x_;
    std::span<const double> d2_;
    double m_;
    std::vector<double> y_;
};

}  // namespace

ExtrapolationFit fit_extrapolation(std::span<const double> c_s, std::span<const double> d2,
                                   std::size_t stride) {
    if (c_s.size() != d2.size()) throw ParameterError("fit_extrapolation: column length mismatch");
    if (stride == 0) throw ParameterError("fit_extrapolation: stride must be >= 1");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < c_s.size(); ++i) {
        const auto cs = static_cast<std::uint64_t>(c_s[i]);
        if (cs % stride != 0) continue;
        if (!ys.empty() && !(d2[i] < ys.back())) {
            throw ParameterError("fit_extrapolation: d2 must be strictly decreasing");
        }
        xs.push_back(c_s[i]);
        ys.push_back(d2[i]);
    }
    if (xs.size() < kMinFitPoints) {
        throw ParameterError("fit_extrapolation: fewer than 10 points after striding");
    }
    if (!(ys.back() > 0.0)) throw ParameterError("fit_extrapolation: d2 must stay positive");

    ExtrapolationObjective objective(xs, ys);

    // Coarse grid. u = a / min(d2): half the points log-spaced towards 0,
    // half with the gap 1 - u log-spaced towards 1, plus u = 0 itself.
    std::vector<double> us{0.0};
    for (int k = 0; k < kGridA / 2; ++k) {
        us.push_back(std::pow(10.0, -8.0 + 8.0 * k / (kGridA / 2 - 1)) * 0.5);
        us.push_back(1.0 - 0.5 * std::pow(10.0, -8.0 * k / (kGridA / 2 - 1)));
    }
    double best_u = 0.0;
    double best_b = kBMin;
    double best_r = -std::numeric_limits<double>::infinity();
    for (double u : us) {
        for (int j = 0; j < kGridB; ++j) {
            const double b = kBMin + (kBMax - kBMin) * j / (kGridB - 1);
            const double r = objective(u, b);
            if (r > best_r) {
                best_r = r;
                best_u = u;
                best_b = b;
            }
        }
    }

    // Hooke-Jeeves refinement: coordinate moves with shrinking steps plus
    // pattern moves along successful directions.
    double step_u = 0.05;
    double step_b = 0.5;
    int evaluations = 0;
    auto explore = [&](double& u, double& b, double& r) {
        for (int coord = 0; coord < 2; ++coord) {
            const double step = coord == 0 ? step_u : step_b;
            for (double sign : {1.0, -1.0}) {
                const double tu = coord == 0 ? u + sign * step : u;
                const double tb = coord == 1 ? b + sign * step : b;
                const double tr = objective(tu, tb);
                ++evaluations;
                if (tr > r) {
                    u = tu;
                    b = tb;
                    r = tr;
                    break;
                }
            }
        }
    };
    while ((step_u > kStepTolerance || step_b > kStepTolerance) && evaluations < kMaxEvaluations) {
        double u = best_u;
        double b = best_b;
        double r = best_r;
        explore(u, b, r);
        if (!(r > best_r)) {
            step_u /= 2.0;
            step_b /= 2.0;
            continue;
        }
        while (evaluations < kMaxEvaluations) {
            const double pu = u + (u - best_u);
            const double pb = b + (b - best_b);
            best_u = u;
            best_b = b;
            best_r = r;
            u = pu;
            b = pb;
            r = objective(u, b);
            ++evaluations;
            explore(u, b, r);
            if (!(r > best_r)) break;
        }
    }

    return ExtrapolationFit{best_u * objective.floor(), best_b, best_r, stride, xs.size()};
}

ExtrapolationFit fit_extrapolation(const Trace& trace, std::size_t stride) {
    std::vector<double> cs;
    std::vector<double> d2;
    cs.reserve(trace.size());
    d2.reserve(trace.size());
    for (const auto& rec : trace) {
        cs.push_back(static_cast<double>(rec.c_s));
        d2.push_back(rec.d2);
    }
    return fit_extrapolation(cs, d2, stride);
}

PowerFit fit_power(const Trace& trace) {
    if (trace.size() < kMinFitPoints) throw ParameterError("fit_power: fewer than 10 records");
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& rec : trace) {
        if (rec.c_t == 0 || rec.c_s == 0) throw ParameterError("fit_power: counters must be positive");
        lx.push_back(std::log(static_cast<double>(rec.c_t)));
        ly.push_back(std::log(static_cast<double>(rec.c_s)));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateError("fit_power: c_t does not vary");
    PowerFit fit;
    fit.f = sxy / sxx;
    fit.c = std::exp(my - fit.f * mx);
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

Diagnostics diagnostics(const DensityMatrix& rho0, const DensityMatrix& rho1) {
    if (rho0.dims() != rho1.dims()) throw DimensionError("diagnostics: subsystem dimensions differ");
    Diagnostics out;
    const ComplexMatrix& a = rho0.matrix();
    const ComplexMatrix& b = rho1.matrix();
    out.commutator_norm = (a * b - b * a).norm();
    out.spectrum0 = eigenvalues_hermitian(a);
    out.spectrum1 = eigenvalues_hermitian(b);
    out.spectral_d2 = (out.spectrum0 - out.spectrum1).squaredNorm();
    return out;
}

namespace {

constexpr double kAscentGain = 1e-12;
constexpr int kMaxSweeps = 1000;

// M with every party except `keep` contracted against its factor.
ComplexMatrix reduce_to_party(const ComplexMatrix& m, const Dims& dims,
                              const std::vector<PureState>& factors, std::size_t keep) {
    ComplexMatrix reduced = m;
    Dims remaining = dims;
    // Highest index first so the lower party indices stay valid.
    for (std::size_t j = dims.size(); j-- > 0;) {
        if (j == keep) continue;
        reduced = contract_party(reduced, j, factors[j], remaining);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return reduced;
}

}  // namespace

SeparableOverlap max_sep_overlap(const ComplexMatrix& m, const Dims& dims, int restarts,
                                 StateSampler& sampler) {
    const int n = total_dim(dims);
    if (dims.size() < 2) throw DimensionError("max_sep_overlap: need at least two parties");
    if (m.rows() != n || m.cols() != n) throw DimensionError("max_sep_overlap: matrix size mismatch");
    if (hermitian_defect(m) > tolerance::kHermitian) {
        throw ValidationError("max_sep_overlap: operator is not Hermitian");
    }
    if (restarts < 1) throw ParameterError("max_sep_overlap: restarts must be >= 1");

    SeparableOverlap best;
    best.lambda = -std::numeric_limits<double>::infinity();
    for (int start = 0; start < restarts; ++start) {
        std::vector<PureState> factors;
        for (int d : dims) factors.push_back(sampler.sample_pure(d));

        double value = -std::numeric_limits<double>::infinity();
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            double top = value;
            for (std::size_t party = 0; party < dims.size(); ++party) {
                const Eigensystem es = eig_hermitian(reduce_to_party(m, dims, factors, party));
                const Eigen::Index last = es.values.size() - 1;
                ComplexVector v = es.vectors.col(last);
                v.normalize();
                factors[party] = PureState(std::move(v));
                top = es.values(last);
            }
            const double gain = top - value;
            value = top;
            if (gain < kAscentGain) break;
        }
        if (value > best.lambda) {
            best.lambda = value;
            best.factors = factors;
        }
    }
    return best;
}

Witness build_witness(const DensityMatrix& rho0, const DensityMatrix& rho1, int restarts,
                      StateSampler& sampler) {
    if (rho0.dims() != rho1.dims()) throw DimensionError("build_witness: subsystem dimensions differ");
    const ComplexMatrix diff = rho0.matrix() - rho1.matrix();
    SeparableOverlap overlap = max_sep_overlap(diff, rho0.dims(), restarts, sampler);
    Witness w;
    w.lambda = overlap.lambda;
    w.op = diff - overlap.lambda * ComplexMatrix::Identity(diff.rows(), diff.cols());
    w.value_rho0 = hs_inner(rho0.matrix(), diff);
    w.dims = rho0.dims();
    w.argmax = std::move(overlap.factors);
    return w;
}

}  // namespace hsd
