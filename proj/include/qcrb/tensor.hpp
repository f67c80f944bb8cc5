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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace qcrb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdClipTol = 1e-10;

/// Ordered subsystem dimensions of a multipartite Hilbert space.
///
/// Basis indices are big-endian in subsystem order: the first subsystem is
/// the most significant digit.
class HilbertLayout {
   public:
    HilbertLayout() = default;
    explicit HilbertLayout(std::vector<std::size_t> dims);

    static HilbertLayout qubits(std::size_t n);

    const std::vector<std::size_t> &dims() const noexcept {
        return dims_;
    }
    std::size_t size() const noexcept {
        return dims_.size();
    }
    std::size_t dim(std::size_t k) const {
        return dims_.at(k);
    }
    std::size_t total() const noexcept {
        return total_;
    }

    /// Layout with subsystem k removed. Removing the last subsystem yields
    /// an empty layout of total dimension 1.
    HilbertLayout without(std::size_t k) const;

    /// Splits a flat index into per-subsystem digits.
    std::vector<std::size_t> digits(std::size_t index) const;
    std::size_t index(std::span<const std::size_t> digits) const;

    bool operator==(const HilbertLayout &other) const = default;

   private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 1;
};

/// A vector on a layout. Normalization is not enforced; callers that need a
/// unit vector check with `is_normalized`.
struct StateVector {
    HilbertLayout layout;
    CVector amplitudes;

    StateVector() = default;
    StateVector(HilbertLayout layout, CVector amplitudes);

    bool is_normalized(double tol = 1e-12) const;
};

CMatrix kron(std::span<const CMatrix> factors);
CMatrix kron(const CMatrix &a, const CMatrix &b);

/// Traces out the subsystems listed in `discard` (0-based, any order).
CMatrix partial_trace(const CMatrix &m, const HilbertLayout &layout, std::span<const std::size_t> discard);

/// Computes <v|M|v> on subsystem k, leaving an operator on the other subsystems.
CMatrix sandwich(const CMatrix &m, const HilbertLayout &layout, std::size_t k, const CVector &v);

struct HermEig {
    RVector values;   // descending
    CMatrix vectors;  // columns, orthonormal
};

HermEig herm_eig(const CMatrix &m);
CMatrix sqrt_psd(const CMatrix &m);

bool is_hermitian(const CMatrix &m, double tol = kHermitianTol);
CMatrix hermitian_part(const CMatrix &m);
double max_abs(const CMatrix &m);
CMatrix projector(const CVector &v);

/// Matrix exponential exp(-i t H) of a Hermitian H.
CMatrix unitary_exp(const CMatrix &hermitian, double t);

nlohmann::json to_json(const CMatrix &m);
nlohmann::json to_json(const CVector &v);
CMatrix matrix_from_json(const nlohmann::json &j);
CVector vector_from_json(const nlohmann::json &j);

}  // namespace qcrb
