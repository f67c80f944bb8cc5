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

#include "qcrb/lm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcrb/errors.hpp"
#include "qcrb/rng.hpp"
#include "qcrb/zerodiag.hpp"

namespace qcrb::lm {

namespace {

struct Evaluated {
    CMatrix c;
    CMatrix d;
};

Evaluated transform(const BipartiteCoeffs &coeffs, const IsometryPair &pair) {
    return {pair.u_mat.adjoint() * coeffs.a_mat * pair.v_mat, pair.u_mat.adjoint() * coeffs.b_mat * pair.v_mat};
}

CMatrix hermitian_from_params(const double *x, Eigen::Index n) {
    CMatrix h(n, n);
    std::size_t at = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = x[at++];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            Complex z(x[at], x[at + 1]);
            at += 2;
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    }
    return h;
}

/// Unconstrained parameterization: first d rows of exp(-i K) for Hermitian K.
struct PairModel {
    const BipartiteCoeffs &coeffs;
    Eigen::Index d1, d2, m1, m2;
    double width;

    Eigen::Index num_params() const {
        return m1 * m1 + m2 * m2;
    }
    Eigen::Index num_residuals() const {
        return 2 * m1 * m2;
    }

    IsometryPair pair(const Eigen::VectorXd &x) const {
        CMatrix w1 = unitary_exp(hermitian_from_params(x.data(), m1), 1.0);
        CMatrix w2 = unitary_exp(hermitian_from_params(x.data() + m1 * m1, m2), 1.0);
        return {w1.topRows(d1), w2.topRows(d2)};
    }

    Eigen::VectorXd residuals(const Eigen::VectorXd &x) const {
        auto ev = transform(coeffs, pair(x));
        Eigen::VectorXd r(num_residuals());
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < m1; ++i) {
            for (Eigen::Index j = 0; j < m2; ++j) {
                Complex c = ev.c(i, j);
                Complex d = ev.d(i, j);
                r(at++) = 2.0 * (std::conj(c) * d).imag();
                // Soft support penalty: active only where C_ij is close to zero.
                r(at++) = std::abs(d) * std::exp(-std::norm(c) / (2.0 * width * width));
            }
        }
        return r;
    }
};

Eigen::VectorXd levenberg_marquardt(const PairModel &model, Eigen::VectorXd x, int iters) {
    const auto n = model.num_params();
    Eigen::VectorXd r = model.residuals(x);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    for (int it = 0; it < iters && cost > 1e-30; ++it) {
        Eigen::MatrixXd jac(model.num_residuals(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
            Eigen::VectorXd xp = x;
            xp(k) += h;
            Eigen::VectorXd xm = x;
            xm(k) -= h;
            jac.col(k) = (model.residuals(xp) - model.residuals(xm)) / (2.0 * h);
        }
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd g = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            Eigen::MatrixXd a = jtj;
            a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
            Eigen::VectorXd step = a.ldlt().solve(-g);
            Eigen::VectorXd xn = x + step;
            Eigen::VectorXd rn = model.residuals(xn);
            double cn = rn.squaredNorm();
            if (cn < cost) {
                x = std::move(xn);
                r = std::move(rn);
                cost = cn;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
            } else {
                lambda *= 4.0;
            }
        }
        if (!improved) {
            break;
        }
    }
    return x;
}

}  // namespace

void IsometryPair::validate() const {
    if (u_mat.rows() > u_mat.cols() || v_mat.rows() > v_mat.cols()) {
        throw ValidationError("isometries must have at least as many columns as rows");
    }
    if (max_abs(u_mat * u_mat.adjoint() - CMatrix::Identity(u_mat.rows(), u_mat.rows())) > 1e-9 ||
        max_abs(v_mat * v_mat.adjoint() - CMatrix::Identity(v_mat.rows(), v_mat.rows())) > 1e-9) {
        throw ValidationError("U U^dagger and V V^dagger must be identities");
    }
}

BipartiteCoeffs coefficient_matrices(const StateVector &psi, const StateVector &psi_perp) {
    if (psi.layout.size() != 2 || !(psi.layout == psi_perp.layout)) {
        throw ValidationError("coefficient matrices need a bipartite layout shared by both vectors");
    }
    if (!psi.is_normalized(1e-10)) {
        throw ValidationError("psi must be normalized");
    }
    const auto d1 = static_cast<Eigen::Index>(psi.layout.dim(0));
    const auto d2 = static_cast<Eigen::Index>(psi.layout.dim(1));
    BipartiteCoeffs out{CMatrix(d1, d2), CMatrix(d1, d2)};
    for (Eigen::Index i = 0; i < d1; ++i) {
        for (Eigen::Index j = 0; j < d2; ++j) {
            out.a_mat(i, j) = psi.amplitudes(i * d2 + j);
            out.b_mat(i, j) = psi_perp.amplitudes(i * d2 + j);
        }
    }
    if (std::abs((out.a_mat.adjoint() * out.b_mat).trace()) > 1e-9) {
        throw ValidationError("psi and psi_perp must be orthogonal");
    }
    return out;
}

BipartiteCoeffs coefficients_for_family(const StateFamily &family, double theta) {
    auto pe = eval_pure(family, theta);
    if (!pe) {
        throw ValidationError("local-measurement analysis needs a pure family");
    }
    const auto &layout = family.layout();
    return coefficient_matrices(StateVector(layout, pe->psi), StateVector(layout, psi_perp(pe->psi, pe->dpsi)));
}

LmFeasibilityReport check_lm_conditions(const BipartiteCoeffs &coeffs, const IsometryPair &pair,
                                        const LmThresholds &thresholds) {
    pair.validate();
    if (coeffs.a_mat.rows() != pair.u_mat.rows() || coeffs.a_mat.cols() != pair.v_mat.rows() ||
        coeffs.b_mat.rows() != coeffs.a_mat.rows() || coeffs.b_mat.cols() != coeffs.a_mat.cols()) {
        throw ValidationError("isometry shapes do not match the coefficient matrices");
    }
    auto ev = transform(coeffs, pair);
    const double c_tol = thresholds.c_tol_rel * max_abs(ev.c);
    LmFeasibilityReport rep;
    for (Eigen::Index i = 0; i < ev.c.rows(); ++i) {
        for (Eigen::Index j = 0; j < ev.c.cols(); ++j) {
            Complex c = ev.c(i, j);
            Complex d = ev.d(i, j);
            rep.phase_residual = std::max(rep.phase_residual, std::abs(c * std::conj(d) - std::conj(c) * d));
            if (std::abs(c) < c_tol) {
                rep.support_residual = std::max(rep.support_residual, std::abs(d));
            }
        }
    }
    rep.feasible = rep.phase_residual <= thresholds.phase && rep.support_residual <= thresholds.support;
    rep.projective = pair.is_projective();
    return rep;
}

IsometryPair construct_lm_2xd(const BipartiteCoeffs &coeffs) {
    const CMatrix &a = coeffs.a_mat;
    const CMatrix &b = coeffs.b_mat;
    if (a.rows() != 2 || b.rows() != 2 || a.cols() != b.cols() || a.cols() < 2) {
        throw ValidationError("construct_lm_2xd needs 2 x d coefficient matrices with d >= 2");
    }
    CMatrix u = zerodiag::zero_diag_basis(a * b.adjoint() - b * a.adjoint());
    CMatrix targets[2];
    for (int i = 0; i < 2; ++i) {
        CMatrix p = projector(u.col(i));
        // Anti-Hermitian target times -i is Hermitian.
        targets[i] = Complex(0.0, -1.0) * (b.adjoint() * p * a - a.adjoint() * p * b);
        if (std::abs(targets[i].trace()) > 1e-10 * std::max(1.0, targets[i].norm())) {
            throw ConvergenceError("construct_lm_2xd: second-stage target is not traceless", std::abs(targets[i].trace()));
        }
    }
    CMatrix v = zerodiag::simultaneous_zero_diag(targets[0], targets[1]);
    return {std::move(u), std::move(v)};
}

SearchResult heuristic_lm_search(const BipartiteCoeffs &coeffs, const SearchOptions &options) {
    const auto d1 = coeffs.a_mat.rows();
    const auto d2 = coeffs.a_mat.cols();
    if (coeffs.b_mat.rows() != d1 || coeffs.b_mat.cols() != d2) {
        throw ValidationError("coefficient matrices must have equal shapes");
    }
    const auto pad1 = options.allow_isometry_padding ? static_cast<Eigen::Index>(options.pad_rows) : 0;
    const auto pad2 = options.allow_isometry_padding ? static_cast<Eigen::Index>(options.pad_cols) : 0;
    PairModel model{coeffs, d1, d2, d1 + pad1, d2 + pad2, options.support_width};
    LmThresholds thresholds{options.success_tol, options.success_tol, 1e-9};

    SearchResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < options.restarts; ++restart) {
        SplitMix64 rng(SplitMix64::derive(options.seed, static_cast<std::uint64_t>(restart)));
        Eigen::VectorXd x(model.num_params());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            x(k) = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
        }
        x = levenberg_marquardt(model, std::move(x), options.iters);
        double obj = model.residuals(x).squaredNorm();
        ++best.restarts_run;
        if (obj < best.objective) {
            best.objective = obj;
            best.best = model.pair(x);
            best.report = check_lm_conditions(coeffs, best.best, thresholds);
        }
        if (best.report.feasible) {
            break;
        }
    }
    return best;
}

Povm lm_povm_from_pair(const IsometryPair &pair) {
    pair.validate();
    Povm povm;
    for (Eigen::Index i = 0; i < pair.u_mat.cols(); ++i) {
        CMatrix e1 = projector(pair.u_mat.col(i));
        for (Eigen::Index j = 0; j < pair.v_mat.cols(); ++j) {
            CVector w = pair.v_mat.col(j).conjugate();
            povm.elements.push_back(kron(e1, projector(w)));
            povm.labels.push_back(std::to_string(i) + "." + std::to_string(j));
        }
    }
    povm.validate();
    return povm;
}

nlohmann::json to_json(const LmFeasibilityReport &r) {
    return {{"phase_residual", r.phase_residual},
            {"support_residual", r.support_residual},
            {"feasible", r.feasible},
            {"projective", r.projective}};
}

}  // namespace qcrb::lm
