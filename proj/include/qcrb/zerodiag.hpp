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

#include <vector>

#include "qcrb/tensor.hpp"

/// Simultaneous zero-diagonalization of traceless Hermitian pairs.
///
/// Any two traceless Hermitian matrices H1, H2 admit an orthonormal basis in
/// which both have an all-zero diagonal. The construction peels one common
/// "null vector" v (<v|H1|v> = <v|H2|v> = 0) at a time and recurses on the
/// orthogonal complement, ending in a closed-form 2x2 rotation. Null vectors
/// are built by splitting the space by the sign of H1's spectrum and joining
/// one vector from each block with a tuned relative angle and phase.
namespace qcrb::zerodiag {

struct TwoByTwoRotation {
    double alpha = 0.0;
    double beta = 0.0;
    /// [[cos b, -sin b e^{ia}], [sin b e^{-ia}, cos b]]
    CMatrix unitary;
};

TwoByTwoRotation solve_2x2(const CMatrix &h1, const CMatrix &h2);

/// H1 eigenbasis split into its non-negative and negative spectral blocks,
/// with H2 expressed in the same basis.
struct BlockSplit {
    CMatrix pos_basis;
    CMatrix neg_basis;
    CMatrix lambda1;  // diagonal, >= 0
    CMatrix lambda2;  // diagonal, < 0
    CMatrix sigma1;
    CMatrix sigma2;
    CMatrix offdiag;  // the B block, pos x neg
    bool case_b = false;
    double rescale = 1.0;  // applied to H2 in case (a)
};

BlockSplit split_blocks(const CMatrix &h1, const CMatrix &h2);

/// Unit vector v with <v|H1|v> = <v|H2|v> = 0. Requires d >= 2.
CVector find_null_vector(const CMatrix &h1, const CMatrix &h2);

struct ZeroDiagResult {
    CMatrix unitary;
    /// Dimension of the space at each peel, outermost first. The 2x2 base
    /// case is not a peel.
    std::vector<Eigen::Index> peel_dims;
    double residual = 0.0;
};

ZeroDiagResult zero_diagonalize_pair(const CMatrix &h1, const CMatrix &h2);

/// Unitary U whose columns zero-diagonalize both H1 and H2.
CMatrix simultaneous_zero_diag(const CMatrix &h1, const CMatrix &h2);

/// Orthonormal basis (as unitary columns) with <u|M|u> = 0 for a traceless M.
/// An exactly zero M yields the Fourier basis.
CMatrix zero_diag_basis(const CMatrix &m_tilde);

/// max_i |(U^dagger M U)_ii|.
double diagonal_residual(const CMatrix &u, const CMatrix &m);

}  // namespace qcrb::zerodiag
