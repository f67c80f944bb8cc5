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

#include <cstdint>

#include "qcrb/metrology.hpp"
#include "qcrb/tensor.hpp"

/// Local-measurement (no communication) analysis for bipartite pure states.
///
/// With psi = sum A_ij |i>|j> and psi_perp = sum B_ij |i>|j>, a product POVM
/// built from isometries U (d1 x m1) and V (d2 x m2) saturates the bound iff
/// C = U^dagger A V and D = U^dagger B V satisfy
///   Im(conj(C_ij) D_ij) = 0            (phase condition)
///   C_ij = 0  =>  D_ij = 0             (support condition)
/// for every entry.
namespace qcrb::lm {

struct BipartiteCoeffs {
    CMatrix a_mat;
    CMatrix b_mat;
};

struct IsometryPair {
    CMatrix u_mat;  // d1 x m1, U U^dagger = I
    CMatrix v_mat;  // d2 x m2, V V^dagger = I

    void validate() const;
    bool is_projective() const {
        return u_mat.rows() == u_mat.cols() && v_mat.rows() == v_mat.cols();
    }
};

struct LmThresholds {
    double phase = 1e-8;
    double support = 1e-8;
    double c_tol_rel = 1e-9;  // "C_ij = 0" means |C_ij| < c_tol_rel * max|C|
};

struct LmFeasibilityReport {
    double phase_residual = 0.0;
    double support_residual = 0.0;
    bool feasible = false;
    bool projective = false;
};

BipartiteCoeffs coefficient_matrices(const StateVector &psi, const StateVector &psi_perp);

/// Coefficients of psi(theta) and psi_perp(theta) for a pure bipartite family.
BipartiteCoeffs coefficients_for_family(const StateFamily &family, double theta);

LmFeasibilityReport check_lm_conditions(const BipartiteCoeffs &coeffs, const IsometryPair &pair,
                                        const LmThresholds &thresholds = {});

/// Projective pair for d1 = 2 that always meets the phase condition; the
/// support condition is reported by check_lm_conditions, not guaranteed.
IsometryPair construct_lm_2xd(const BipartiteCoeffs &coeffs);

struct SearchOptions {
    int restarts = 100;
    int iters = 200;
    bool allow_isometry_padding = true;
    std::size_t pad_rows = 0;  // m1 - d1
    std::size_t pad_cols = 1;  // m2 - d2
    std::uint64_t seed = 1;
    double success_tol = 1e-6;
    double support_width = 1e-3;
};

struct SearchResult {
    IsometryPair best;
    LmFeasibilityReport report;
    double objective = 0.0;
    int restarts_run = 0;
    /// Failure to find a pair is numerical evidence, never a proof.
    bool evidence_only = true;
};

SearchResult heuristic_lm_search(const BipartiteCoeffs &coeffs, const SearchOptions &options = {});

/// Rank-one product POVM |u_i><u_i| (x) |conj v_j><conj v_j| from the
/// columns of U and V.
Povm lm_povm_from_pair(const IsometryPair &pair);

nlohmann::json to_json(const LmFeasibilityReport &report);

}  // namespace qcrb::lm
