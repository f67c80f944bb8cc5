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

#include "qcrb/zerodiag.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcrb/errors.hpp"

namespace qcrb::zerodiag {

namespace {

constexpr double kNullVectorTol = 1e-9;
constexpr double kPolishTrigger = 1e-12;
constexpr int kPolishIters = 200;

void check_pair(const CMatrix &h1, const CMatrix &h2) {
    if (h1.rows() != h1.cols() || h2.rows() != h2.cols() || h1.rows() != h2.rows() || h1.rows() == 0) {
        throw ValidationError("zero-diagonalization needs two square matrices of equal size");
    }
    if (!is_hermitian(h1) || !is_hermitian(h2)) {
        throw ValidationError("zero-diagonalization needs Hermitian inputs");
    }
    for (const auto *h : {&h1, &h2}) {
        if (std::abs(h->trace()) > 1e-10 * std::max(1.0, h->norm())) {
            throw ValidationError("zero-diagonalization needs traceless inputs");
        }
    }
}

CMatrix centered(const CMatrix &h) {
    const auto d = h.rows();
    CMatrix out = hermitian_part(h);
    out -= (out.trace().real() / static_cast<double>(d)) * CMatrix::Identity(d, d);
    return out;
}

double expectation(const CMatrix &h, const CVector &v) {
    return v.dot(h * v).real();
}

double pair_residual(const CMatrix &h1, const CMatrix &h2, const CVector &v) {
    return std::max(std::abs(expectation(h1, v)), std::abs(expectation(h2, v)));
}

/// Damped Gauss-Newton on the two expectation values over unit vectors.
CVector polish(const CMatrix &h1, const CMatrix &h2, CVector v) {
    const auto d = v.size();
    const double scale = h1.norm() + h2.norm();
    double mu = 1e-3 * scale * scale;
    v.normalize();
    double best = pair_residual(h1, h2, v);
    for (int it = 0; it < kPolishIters && best > 1e-15 * scale; ++it) {
        Eigen::Vector2d r;
        Eigen::MatrixXd jac(2, 2 * d);
        const CMatrix *hs[2] = {&h1, &h2};
        for (int k = 0; k < 2; ++k) {
            double f = expectation(*hs[k], v);
            r(k) = f;
            CVector w = (*hs[k]) * v - f * v;
            for (Eigen::Index i = 0; i < d; ++i) {
                jac(k, i) = 2.0 * w(i).real();
                jac(k, d + i) = 2.0 * w(i).imag();
            }
        }
        Eigen::Matrix2d normal = jac * jac.transpose();
        normal.diagonal().array() += mu;
        Eigen::VectorXd step = -jac.transpose() * normal.ldlt().solve(r);
        CVector trial = v;
        for (Eigen::Index i = 0; i < d; ++i) {
            trial(i) += Complex(step(i), step(d + i));
        }
        trial.normalize();
        double res = pair_residual(h1, h2, trial);
        if (res < best) {
            v = trial;
            best = res;
            mu = std::max(mu * 0.1, 1e-30);
        } else {
            mu *= 10.0;
        }
    }
    return v;
}

/// Unit vector from an orthonormal basis of the block, chosen by the largest
/// (sign = +1) or smallest (sign = -1) value of <u|lambda|u>.
CVector pick_block_vector(const CMatrix &target, const CMatrix &lambda, double sign, double tie_tol) {
    const auto n = target.rows();
    if (n == 1) {
        return CVector::Ones(1);
    }
    CMatrix basis = simultaneous_zero_diag(centered(target), CMatrix::Zero(n, n));
    Eigen::Index best_idx = 0;
    double best_val = sign * expectation(lambda, basis.col(0));
    for (Eigen::Index i = 1; i < n; ++i) {
        double val = sign * expectation(lambda, basis.col(i));
        if (val > best_val + tie_tol) {
            best_val = val;
            best_idx = i;
        }
    }
    return basis.col(best_idx);
}

CMatrix orthonormal_complement(const CVector &v) {
    Eigen::HouseholderQR<CMatrix> qr(v);
    CMatrix q = qr.householderQ() * CMatrix::Identity(v.size(), v.size());
    return q.rightCols(v.size() - 1);
}

CMatrix zero_diag_rec(const CMatrix &h1, const CMatrix &h2, std::vector<Eigen::Index> &peels) {
    const auto d = h1.rows();
    if (d == 1) {
        return CMatrix::Ones(1, 1);
    }
    if (d == 2) {
        return solve_2x2(h1, h2).unitary;
    }
    peels.push_back(d);
    CVector v = find_null_vector(h1, h2);
    CMatrix q = orthonormal_complement(v);
    CMatrix sub = zero_diag_rec(centered(q.adjoint() * h1 * q), centered(q.adjoint() * h2 * q), peels);
    CMatrix out(d, d);
    out.col(0) = v;
    out.rightCols(d - 1) = q * sub;
    return out;
}

}  // namespace

TwoByTwoRotation solve_2x2(const CMatrix &h1_in, const CMatrix &h2_in) {
    if (h1_in.rows() != 2 || h1_in.cols() != 2 || h2_in.rows() != 2 || h2_in.cols() != 2) {
        throw ValidationError("solve_2x2 needs 2x2 matrices");
    }
    check_pair(h1_in, h2_in);
    const CMatrix h[2] = {centered(h1_in), centered(h2_in)};
    const double scale = h[0].norm() + h[1].norm();
    const double tiny = 1e-14 * scale;

    double a[2], b[2], phi[2];
    for (int k = 0; k < 2; ++k) {
        a[k] = h[k](0, 0).real();
        b[k] = std::abs(h[k](0, 1));
        phi[k] = std::arg(h[k](0, 1));
        if (std::abs(a[k]) <= tiny) {
            a[k] = 0.0;
        }
        if (b[k] <= tiny) {
            b[k] = 0.0;
            phi[k] = 0.0;
        }
    }

    TwoByTwoRotation out;
    // b1 a2 cos(alpha - phi1) = b2 a1 cos(alpha - phi2)  <=>  X cos(alpha) + Y sin(alpha) = 0.
    double x = b[0] * a[1] * std::cos(phi[0]) - b[1] * a[0] * std::cos(phi[1]);
    double y = b[0] * a[1] * std::sin(phi[0]) - b[1] * a[0] * std::sin(phi[1]);
    if (std::hypot(x, y) > 1e-13 * scale * scale) {
        out.alpha = std::atan2(-x, y);
    }
    int k = std::abs(a[0]) >= std::abs(a[1]) ? 0 : 1;
    if (a[k] != 0.0) {
        // cot(2 beta) = -(b_k / a_k) cos(alpha - phi_k)
        out.beta = 0.5 * std::atan2(a[k], -b[k] * std::cos(out.alpha - phi[k]));
    }
    double c = std::cos(out.beta);
    double s = std::sin(out.beta);
    out.unitary = CMatrix(2, 2);
    out.unitary << c, -s * std::polar(1.0, out.alpha), s * std::polar(1.0, -out.alpha), c;
    return out;
}

BlockSplit split_blocks(const CMatrix &h1, const CMatrix &h2) {
    const auto d = h1.rows();
    const double scale = h1.norm() + h2.norm();
    auto eig = herm_eig(h1);
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < d; ++i) {
        // Zero (and numerically zero) eigenvalues go to the non-negative block.
        (eig.values(i) >= -1e-14 * scale ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw ValidationError("split_blocks: H1 must be non-zero and traceless");
    }
    const auto p = static_cast<Eigen::Index>(pos.size());
    const auto q = static_cast<Eigen::Index>(neg.size());
    BlockSplit out;
    out.pos_basis = CMatrix(d, p);
    out.neg_basis = CMatrix(d, q);
    for (Eigen::Index i = 0; i < p; ++i) {
        out.pos_basis.col(i) = eig.vectors.col(pos[i]);
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        out.neg_basis.col(i) = eig.vectors.col(neg[i]);
    }
    out.lambda1 = CMatrix::Zero(p, p);
    out.lambda2 = CMatrix::Zero(q, q);
    for (Eigen::Index i = 0; i < p; ++i) {
        out.lambda1(i, i) = std::max(eig.values(pos[i]), 0.0);
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        out.lambda2(i, i) = eig.values(neg[i]);
    }
    out.sigma1 = hermitian_part(out.pos_basis.adjoint() * h2 * out.pos_basis);
    out.sigma2 = hermitian_part(out.neg_basis.adjoint() * h2 * out.neg_basis);
    out.offdiag = out.pos_basis.adjoint() * h2 * out.neg_basis;

    double t1 = out.sigma1.trace().real();
    out.case_b = std::abs(t1) <= 1e-12 * h2.norm();
    if (!out.case_b) {
        out.rescale = out.lambda1.trace().real() / t1;
    }
    return out;
}

CVector find_null_vector(const CMatrix &h1_in, const CMatrix &h2_in) {
    check_pair(h1_in, h2_in);
    const auto d = h1_in.rows();
    if (d < 2) {
        throw ValidationError("find_null_vector needs dimension >= 2");
    }
    CMatrix h1 = centered(h1_in);
    CMatrix h2 = centered(h2_in);
    const double scale = h1.norm() + h2.norm();
    if (scale == 0.0) {
        return CVector::Unit(d, 0);
    }
    if (h1.norm() <= 1e-12 * scale) {
        std::swap(h1, h2);
    }

    auto split = split_blocks(h1, h2);
    const double tie_tol = 1e-14 * scale;
    CMatrix t1, t2;
    if (split.case_b) {
        t1 = split.sigma1;
        t2 = split.sigma2;
    } else {
        t1 = split.lambda1 - split.rescale * split.sigma1;
        t2 = split.lambda2 - split.rescale * split.sigma2;
    }
    CVector v1 = pick_block_vector(t1, split.lambda1, +1.0, tie_tol);
    CVector v2 = pick_block_vector(t2, split.lambda2, -1.0, tie_tol);

    double a1 = expectation(split.lambda1, v1);
    double a2 = expectation(split.lambda2, v2);
    double s1 = expectation(split.sigma1, v1);
    double s2 = expectation(split.sigma2, v2);
    Complex bval = v1.dot(split.offdiag * v2);

    // cos^2 a1 + sin^2 a2 = 0 fixes beta; the phase then cancels the H2 diagonal.
    double beta = std::atan(std::sqrt(a1 / -a2));
    double c = std::cos(beta);
    double s = std::sin(beta);
    double target = -(c * c * s1 + s * s * s2) / (2.0 * c * s);
    double alpha = 0.0;
    double bmag = std::abs(bval);
    if (bmag > 0.0) {
        alpha = std::arg(bval) - std::acos(std::clamp(target / bmag, -1.0, 1.0));
    }

    CVector v = c * (split.pos_basis * v1) + s * std::polar(1.0, -alpha) * (split.neg_basis * v2);
    v.normalize();
    if (pair_residual(h1, h2, v) > kPolishTrigger * scale) {
        v = polish(h1, h2, v);
    }
    double res = pair_residual(h1, h2, v);
    if (res > kNullVectorTol * scale) {
        throw ConvergenceError("find_null_vector: construction did not reach tolerance", res);
    }
    return v;
}

ZeroDiagResult zero_diagonalize_pair(const CMatrix &h1_in, const CMatrix &h2_in) {
    check_pair(h1_in, h2_in);
    CMatrix h1 = centered(h1_in);
    CMatrix h2 = centered(h2_in);
    ZeroDiagResult out;
    out.unitary = zero_diag_rec(h1, h2, out.peel_dims);
    out.residual = std::max(diagonal_residual(out.unitary, h1), diagonal_residual(out.unitary, h2));
    const double limit = 1e-8 * std::max(h1.norm(), h2.norm());
    if (out.residual > limit) {
        throw ConvergenceError("zero_diagonalize_pair: residual above tolerance", out.residual);
    }
    return out;
}

CMatrix simultaneous_zero_diag(const CMatrix &h1, const CMatrix &h2) {
    return zero_diagonalize_pair(h1, h2).unitary;
}

CMatrix zero_diag_basis(const CMatrix &m) {
    if (m.rows() != m.cols()) {
        throw ValidationError("zero_diag_basis needs a square matrix");
    }
    const double norm = m.norm();
    if (std::abs(m.trace()) > 1e-9 * norm) {
        throw ValidationError("zero_diag_basis needs a traceless matrix");
    }
    if (norm == 0.0) {
        // Nothing to satisfy. The Fourier basis is unbiased to the computational
        // one, which makes it the limit for any shrinking diagonal input.
        const auto d = m.rows();
        CMatrix f(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index k = 0; k < d; ++k) {
                f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                                     2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(d));
            }
        }
        return f;
    }
    CMatrix h1 = (m + m.adjoint()) / 2.0;
    CMatrix h2 = (m - m.adjoint()) / Complex(0.0, 2.0);
    return simultaneous_zero_diag(centered(h1), centered(h2));
}

double diagonal_residual(const CMatrix &u, const CMatrix &m) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
        worst = std::max(worst, std::abs(u.col(i).dot(m * u.col(i))));
    }
    return worst;
}

}  // namespace qcrb::zerodiag
