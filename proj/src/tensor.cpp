// Copyright 2026 The qcrb-locc Authors
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

#include "qcrb/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcrb/errors.hpp"

namespace qcrb {

HilbertLayout::HilbertLayout(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw ValidationError("layout needs at least one subsystem");
    }
    for (auto d : dims_) {
        if (d < 2) {
            throw ValidationError("subsystem dimensions must be at least 2");
        }
        total_ *= d;
    }
}

HilbertLayout HilbertLayout::qubits(std::size_t n) {
    return HilbertLayout(std::vector<std::size_t>(n, 2));
}

HilbertLayout HilbertLayout::without(std::size_t k) const {
    if (k >= dims_.size()) {
        throw ValidationError("subsystem index out of range");
    }
    HilbertLayout out;
    out.dims_ = dims_;
    out.dims_.erase(out.dims_.begin() + static_cast<std::ptrdiff_t>(k));
    out.total_ = total_ / dims_[k];
    return out;
}

std::vector<std::size_t> HilbertLayout::digits(std::size_t index) const {
    std::vector<std::size_t> out(dims_.size());
    for (std::size_t k = dims_.size(); k-- > 0;) {
        out[k] = index % dims_[k];
        index /= dims_[k];
    }
    return out;
}

std::size_t HilbertLayout::index(std::span<const std::size_t> digits) const {
    std::size_t out = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        out = out * dims_[k] + digits[k];
    }
    return out;
}

StateVector::StateVector(HilbertLayout layout_, CVector amplitudes_)
    : layout(std::move(layout_)), amplitudes(std::move(amplitudes_)) {
    if (static_cast<std::size_t>(amplitudes.size()) != layout.total()) {
        throw ValidationError("state vector length does not match layout");
    }
    if (!amplitudes.allFinite()) {
        throw ValidationError("state vector has non-finite entries");
    }
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(amplitudes.norm() - 1.0) <= tol;
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix kron(std::span<const CMatrix> factors) {
    if (factors.empty()) {
        throw ValidationError("kron needs at least one factor");
    }
    CMatrix out = factors[0];
    for (std::size_t k = 1; k < factors.size(); ++k) {
        out = kron(out, factors[k]);
    }
    if (!out.allFinite()) {
        throw ValidationError("kron factors must be finite");
    }
    return out;
}

namespace {

void check_square(const CMatrix &m, const HilbertLayout &layout) {
    auto d = static_cast<Eigen::Index>(layout.total());
    if (m.rows() != d || m.cols() != d) {
        throw ValidationError("operator dimension does not match layout");
    }
}

}  // namespace

CMatrix partial_trace(const CMatrix &m, const HilbertLayout &layout, std::span<const std::size_t> discard) {
    check_square(m, layout);
    std::vector<bool> dropped(layout.size(), false);
    for (auto k : discard) {
        if (k >= layout.size()) {
            throw ValidationError("partial_trace: subsystem index out of range");
        }
        dropped[k] = true;
    }
    std::size_t kept_total = 1;
    std::size_t dropped_total = 1;
    for (std::size_t k = 0; k < layout.size(); ++k) {
        (dropped[k] ? dropped_total : kept_total) *= layout.dim(k);
    }

    // full[kept * dropped_total + traced] = flat index in the full space.
    std::vector<std::size_t> full(layout.total());
    for (std::size_t i = 0; i < layout.total(); ++i) {
        auto dig = layout.digits(i);
        std::size_t kept = 0;
        std::size_t traced = 0;
        for (std::size_t k = 0; k < layout.size(); ++k) {
            if (dropped[k]) {
                traced = traced * layout.dim(k) + dig[k];
            } else {
                kept = kept * layout.dim(k) + dig[k];
            }
        }
        full[kept * dropped_total + traced] = i;
    }

    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(kept_total), static_cast<Eigen::Index>(kept_total));
    for (std::size_t a = 0; a < kept_total; ++a) {
        for (std::size_t b = 0; b < kept_total; ++b) {
            Complex acc = 0.0;
            for (std::size_t r = 0; r < dropped_total; ++r) {
                acc += m(static_cast<Eigen::Index>(full[a * dropped_total + r]),
                         static_cast<Eigen::Index>(full[b * dropped_total + r]));
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    return out;
}

CMatrix sandwich(const CMatrix &m, const HilbertLayout &layout, std::size_t k, const CVector &v) {
    check_square(m, layout);
    if (k >= layout.size()) {
        throw ValidationError("sandwich: subsystem index out of range");
    }
    const std::size_t dk = layout.dim(k);
    if (static_cast<std::size_t>(v.size()) != dk) {
        throw ValidationError("sandwich: local vector has wrong dimension");
    }
    if (std::abs(v.norm() - 1.0) > 1e-10) {
        throw ValidationError("sandwich: local vector must be normalized");
    }
    const std::size_t rest = layout.total() / dk;

    // full[r * dk + s] = flat index with subsystem k set to s and the rest to r.
    std::vector<std::size_t> full(layout.total());
    for (std::size_t i = 0; i < layout.total(); ++i) {
        auto dig = layout.digits(i);
        std::size_t r = 0;
        for (std::size_t j = 0; j < layout.size(); ++j) {
            if (j != k) {
                r = r * layout.dim(j) + dig[j];
            }
        }
        full[r * dk + dig[k]] = i;
    }

    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(rest), static_cast<Eigen::Index>(rest));
    for (std::size_t a = 0; a < rest; ++a) {
        for (std::size_t b = 0; b < rest; ++b) {
            Complex acc = 0.0;
            for (std::size_t s = 0; s < dk; ++s) {
                Complex row = 0.0;
                for (std::size_t t = 0; t < dk; ++t) {
                    row += m(static_cast<Eigen::Index>(full[a * dk + s]), static_cast<Eigen::Index>(full[b * dk + t])) *
                           v(static_cast<Eigen::Index>(t));
                }
                acc += std::conj(v(static_cast<Eigen::Index>(s))) * row;
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    return out;
}

double max_abs(const CMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return max_abs(m - m.adjoint()) <= tol * std::max(1.0, max_abs(m));
}

CMatrix hermitian_part(const CMatrix &m) {
    return (m + m.adjoint()) / 2.0;
}

CMatrix projector(const CVector &v) {
    return v * v.adjoint();
}

HermEig herm_eig(const CMatrix &m) {
    if (m.rows() != m.cols()) {
        throw ValidationError("herm_eig: matrix is not square");
    }
    if (!m.allFinite()) {
        throw ValidationError("herm_eig: matrix has non-finite entries");
    }
    if (!is_hermitian(m)) {
        throw ValidationError("herm_eig: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("herm_eig: eigensolver failed", 0.0);
    }
    const auto n = m.rows();
    HermEig out{RVector(n), CMatrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

CMatrix sqrt_psd(const CMatrix &m) {
    auto eig = herm_eig(m);
    RVector roots(eig.values.size());
    // rounding noise on a zero eigenvalue would otherwise turn 1e-16 into 1e-8
    const double floor = 1e-14 * std::max(1.0, eig.values.size() ? eig.values(0) : 0.0);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        double lam = eig.values(i);
        if (lam < -kPsdClipTol) {
            throw ValidationError("sqrt_psd: matrix has a negative eigenvalue " + std::to_string(lam));
        }
        roots(i) = lam <= floor ? 0.0 : std::sqrt(lam);
    }
    return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

CMatrix unitary_exp(const CMatrix &hermitian, double t) {
    auto eig = herm_eig(hermitian);
    CVector phases(eig.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases(i) = std::polar(1.0, -t * eig.values(i));
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

nlohmann::json to_json(const CMatrix &m) {
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        out.push_back(std::move(row));
    }
    return out;
}

nlohmann::json to_json(const CVector &v) {
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({v(i).real(), v(i).imag()});
    }
    return out;
}

namespace {

Complex complex_from_json(const nlohmann::json &j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError("complex entries must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

CVector vector_from_json(const nlohmann::json &j) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError("vector must be a non-empty array");
    }
    CVector out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    }
    if (!out.allFinite()) {
        throw ValidationError("vector has non-finite entries");
    }
    return out;
}

CMatrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
        throw ValidationError("matrix must be a non-empty array of rows");
    }
    const auto rows = j.size();
    const auto cols = j[0].size();
    CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw ValidationError("matrix rows must have equal length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
        }
    }
    if (!out.allFinite()) {
        throw ValidationError("matrix has non-finite entries");
    }
    return out;
}

}  // namespace qcrb
