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

#include "qcrb/metrology.hpp"

#include <algorithm>
#include <cmath>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace {

void check_theta(const ThetaDomain &domain, double theta) {
    if (!std::isfinite(theta) || !domain.contains(theta)) {
        throw ValidationError("theta " + std::to_string(theta) + " is outside the family's domain");
    }
}

void check_vector(const HilbertLayout &layout, const CVector &v, const char *what) {
    if (static_cast<std::size_t>(v.size()) != layout.total()) {
        throw ValidationError(std::string(what) + " has the wrong dimension");
    }
    if (!v.allFinite()) {
        throw ValidationError(std::string(what) + " has non-finite entries");
    }
}

CMatrix pure_drho(const CVector &psi, const CVector &dpsi) {
    return dpsi * psi.adjoint() + psi * dpsi.adjoint();
}

CMatrix checked_density(const MixedGeneric &f, double theta) {
    CMatrix rho = f.evaluator(theta);
    auto d = static_cast<Eigen::Index>(f.layout.total());
    if (rho.rows() != d || rho.cols() != d) {
        throw ValidationError("density evaluator returned the wrong dimension");
    }
    if (!rho.allFinite()) {
        throw ValidationError("density evaluator returned non-finite entries");
    }
    if (!is_hermitian(rho, 1e-9)) {
        throw ValidationError("density evaluator returned a non-Hermitian matrix");
    }
    rho = hermitian_part(rho);
    if (std::abs(rho.trace().real() - 1.0) > 1e-9) {
        throw ValidationError("density matrix does not have unit trace");
    }
    if (herm_eig(rho).values.minCoeff() < -1e-9) {
        throw ValidationError("density matrix is not positive semidefinite");
    }
    return rho;
}

double checked_probability(const RankTwoFixedBasis &f, double theta) {
    double p = f.p(theta);
    if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError("rank-two weight p(theta) must lie in (0, 1)");
    }
    return p;
}

CVector numeric_state(const PureNumeric &f, double theta) {
    CVector psi = f.evaluator(theta);
    check_vector(f.layout, psi, "state evaluator output");
    if (std::abs(psi.norm() - 1.0) > 1e-9) {
        throw ValidationError("state evaluator returned an unnormalized vector");
    }
    return psi;
}

}  // namespace

StateFamily StateFamily::unitary_generator(HilbertLayout layout, CVector psi_in, CMatrix generator, ThetaDomain domain) {
    check_vector(layout, psi_in, "psi_in");
    if (std::abs(psi_in.norm() - 1.0) > 1e-12) {
        throw ValidationError("psi_in must be normalized");
    }
    auto d = static_cast<Eigen::Index>(layout.total());
    if (generator.rows() != d || generator.cols() != d) {
        throw ValidationError("generator dimension does not match layout");
    }
    if (!is_hermitian(generator)) {
        throw ValidationError("generator must be Hermitian");
    }
    generator = hermitian_part(generator);
    auto eig = herm_eig(generator);
    return StateFamily(UnitaryGenerator{std::move(layout), std::move(psi_in), std::move(generator), domain, std::move(eig)});
}

StateFamily StateFamily::pure_numeric(HilbertLayout layout, std::function<CVector(double)> evaluator, double step,
                                      ThetaDomain domain) {
    if (!evaluator || !(step > 0.0)) {
        throw ValidationError("pure_numeric needs an evaluator and a positive step");
    }
    return StateFamily(PureNumeric{std::move(layout), std::move(evaluator), step, domain});
}

StateFamily StateFamily::rank_two(HilbertLayout layout, CVector psi0, CVector psi1, std::function<double(double)> p,
                                  std::function<double(double)> dp, ThetaDomain domain) {
    check_vector(layout, psi0, "psi0");
    check_vector(layout, psi1, "psi1");
    if (std::abs(psi0.norm() - 1.0) > 1e-10 || std::abs(psi1.norm() - 1.0) > 1e-10) {
        throw ValidationError("rank-two basis vectors must be normalized");
    }
    if (std::abs(psi0.dot(psi1)) > 1e-10) {
        throw ValidationError("rank-two basis vectors must be orthogonal");
    }
    if (!p || !dp) {
        throw ValidationError("rank-two family needs p and p' evaluators");
    }
    return StateFamily(RankTwoFixedBasis{std::move(layout), std::move(psi0), std::move(psi1), std::move(p), std::move(dp), domain});
}

StateFamily StateFamily::mixed(HilbertLayout layout, std::function<CMatrix(double)> evaluator, double step,
                               ThetaDomain domain, std::function<CMatrix(double)> derivative) {
    if (!evaluator || !(step > 0.0)) {
        throw ValidationError("mixed family needs an evaluator and a positive step");
    }
    return StateFamily(MixedGeneric{std::move(layout), std::move(evaluator), step, domain, std::move(derivative)});
}

const HilbertLayout &StateFamily::layout() const {
    return std::visit([](const auto &f) -> const HilbertLayout & { return f.layout; }, v_);
}

const ThetaDomain &StateFamily::domain() const {
    return std::visit([](const auto &f) -> const ThetaDomain & { return f.domain; }, v_);
}

bool StateFamily::is_pure() const {
    return std::holds_alternative<UnitaryGenerator>(v_) || std::holds_alternative<PureNumeric>(v_);
}

std::string StateFamily::kind() const {
    switch (v_.index()) {
        case 0:
            return "unitary-generator";
        case 1:
            return "pure-numeric";
        case 2:
            return "rank-two";
        default:
            return "mixed";
    }
}

std::optional<PureEval> eval_pure(const StateFamily &family, double theta) {
    check_theta(family.domain(), theta);
    if (auto *u = std::get_if<UnitaryGenerator>(&family.variant())) {
        const auto &eig = u->generator_eig;
        CVector phases(eig.values.size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) {
            phases(i) = std::polar(1.0, -theta * eig.values(i));
        }
        CVector psi = eig.vectors * (phases.asDiagonal() * (eig.vectors.adjoint() * u->psi_in));
        CVector dpsi = Complex(0.0, -1.0) * (u->generator * psi);
        return PureEval{std::move(psi), std::move(dpsi)};
    }
    if (auto *n = std::get_if<PureNumeric>(&family.variant())) {
        CVector psi = numeric_state(*n, theta);
        CVector plus = numeric_state(*n, theta + n->step);
        CVector minus = numeric_state(*n, theta - n->step);
        return PureEval{std::move(psi), (plus - minus) / (2.0 * n->step)};
    }
    return std::nullopt;
}

std::optional<CVector> pure_state(const StateFamily &family, double theta) {
    check_theta(family.domain(), theta);
    if (auto *u = std::get_if<UnitaryGenerator>(&family.variant())) {
        const auto &eig = u->generator_eig;
        CVector phases(eig.values.size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) {
            phases(i) = std::polar(1.0, -theta * eig.values(i));
        }
        return CVector(eig.vectors * (phases.asDiagonal() * (eig.vectors.adjoint() * u->psi_in)));
    }
    if (auto *n = std::get_if<PureNumeric>(&family.variant())) {
        return numeric_state(*n, theta);
    }
    return std::nullopt;
}

CMatrix density(const StateFamily &family, double theta) {
    check_theta(family.domain(), theta);
    if (auto psi = pure_state(family, theta)) {
        return projector(*psi);
    }
    if (auto *r = std::get_if<RankTwoFixedBasis>(&family.variant())) {
        double p = checked_probability(*r, theta);
        return p * projector(r->psi0) + (1.0 - p) * projector(r->psi1);
    }
    return checked_density(std::get<MixedGeneric>(family.variant()), theta);
}

StateEval eval_state(const StateFamily &family, double theta) {
    check_theta(family.domain(), theta);
    return std::visit(
        [&](const auto &f) -> StateEval {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, UnitaryGenerator>) {
                auto pe = *eval_pure(family, theta);
                return {projector(pe.psi), pure_drho(pe.psi, pe.dpsi)};
            } else if constexpr (std::is_same_v<T, PureNumeric>) {
                CVector psi = numeric_state(f, theta);
                CVector plus = numeric_state(f, theta + f.step);
                CVector minus = numeric_state(f, theta - f.step);
                CMatrix drho = (projector(plus) - projector(minus)) / (2.0 * f.step);
                return {projector(psi), hermitian_part(drho)};
            } else if constexpr (std::is_same_v<T, RankTwoFixedBasis>) {
                double p = checked_probability(f, theta);
                CMatrix p0 = projector(f.psi0);
                CMatrix p1 = projector(f.psi1);
                return {p * p0 + (1.0 - p) * p1, f.dp(theta) * (p0 - p1)};
            } else {
                CMatrix rho = checked_density(f, theta);
                if (f.derivative) {
                    CMatrix d = f.derivative(theta);
                    if (d.rows() != rho.rows() || d.cols() != rho.cols() || !d.allFinite()) {
                        throw ValidationError("density derivative has the wrong shape or non-finite entries");
                    }
                    return {std::move(rho), hermitian_part(d)};
                }
                CMatrix plus = checked_density(f, theta + f.step);
                CMatrix minus = checked_density(f, theta - f.step);
                return {std::move(rho), hermitian_part((plus - minus) / (2.0 * f.step))};
            }
        },
        family.variant());
}

Eigen::Index SldResult::rank() const {
    Eigen::Index r = 0;
    while (r < eigvals.size() && eigvals(r) >= rank_tol) {
        ++r;
    }
    return r;
}

SldResult sld(const CMatrix &rho, const CMatrix &drho, double rank_tol) {
    if (rho.rows() != rho.cols() || drho.rows() != rho.rows() || drho.cols() != rho.cols()) {
        throw ValidationError("sld: rho and drho must be square and of equal size");
    }
    if (!is_hermitian(rho) || !is_hermitian(drho, 1e-9)) {
        throw ValidationError("sld: rho and drho must be Hermitian");
    }
    auto eig = herm_eig(rho);
    const auto d = rho.rows();
    RVector p = eig.values;
    for (Eigen::Index k = 0; k < d; ++k) {
        if (p(k) < rank_tol) {
            p(k) = 0.0;
        }
    }
    CMatrix x = eig.vectors.adjoint() * hermitian_part(drho) * eig.vectors;
    const double unrepresentable_tol = 1e-8 * std::max(1.0, max_abs(drho));
    CMatrix l_eig = CMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            double s = p(j) + p(k);
            if (s > 0.0) {
                l_eig(j, k) = 2.0 / s * x(j, k);
            } else if (std::abs(x(j, k)) > unrepresentable_tol) {
                throw ValidationError("sld: drho couples two null directions of rho; no SLD exists");
            }
        }
    }
    SldResult out;
    out.L = hermitian_part(eig.vectors * l_eig * eig.vectors.adjoint());
    out.eigvals = eig.values;
    out.eigvecs = eig.vectors;
    out.rank_tol = rank_tol;
    out.qfi = std::max(0.0, (rho * out.L * out.L).trace().real());
    return out;
}

double qfi(const StateFamily &family, double theta) {
    auto s = eval_state(family, theta);
    return sld(s.rho, s.drho).qfi;
}

void Povm::validate() const {
    if (elements.empty()) {
        throw ValidationError("POVM has no elements");
    }
    if (!labels.empty() && labels.size() != elements.size()) {
        throw ValidationError("POVM labels do not match its elements");
    }
    const auto d = elements.front().rows();
    CMatrix total = CMatrix::Zero(d, d);
    for (const auto &e : elements) {
        if (e.rows() != d || e.cols() != d) {
            throw ValidationError("POVM elements must share one square dimension");
        }
        if (!is_hermitian(e, 1e-9)) {
            throw ValidationError("POVM element is not Hermitian");
        }
        if (herm_eig(e).values.minCoeff() < -1e-9) {
            throw ValidationError("POVM element is not positive semidefinite");
        }
        total += e;
    }
    if (max_abs(total - CMatrix::Identity(d, d)) > 1e-8) {
        throw ValidationError("POVM elements do not sum to the identity");
    }
}

Povm povm_from_basis(const CMatrix &basis) {
    Povm out;
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
        out.elements.push_back(projector(basis.col(i)));
        out.labels.push_back(std::to_string(i));
    }
    return out;
}

double fisher_info(const Povm &povm, const CMatrix &rho, const CMatrix &drho, double p_tol) {
    povm.validate();
    if (povm.elements.front().rows() != rho.rows()) {
        throw ValidationError("fisher_info: POVM and state dimensions differ");
    }
    double f = 0.0;
    for (const auto &e : povm.elements) {
        double p = (e * rho).trace().real();
        if (p < p_tol) {
            continue;
        }
        double dp = (e * drho).trace().real();
        f += dp * dp / p;
    }
    return f;
}

CVector psi_perp(const CVector &psi, const CVector &dpsi) {
    if (psi.size() != dpsi.size()) {
        throw ValidationError("psi_perp: dimension mismatch");
    }
    return dpsi - psi * psi.dot(dpsi);
}

std::string to_string(StateType t) {
    switch (t) {
        case StateType::Pure:
            return "pure";
        case StateType::RankTwo:
            return "rank-two";
        default:
            return "general";
    }
}

namespace {

std::vector<CMatrix> m_set_from_sld(const SldResult &s) {
    std::vector<CMatrix> out;
    const auto r = s.rank();
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
            CMatrix outer = s.eigvecs.col(i) * s.eigvecs.col(j).adjoint();
            out.push_back(outer * s.L - s.L * outer);
        }
    }
    return out;
}

double max_offdiag_in_basis(const CMatrix &rho, const CMatrix &basis) {
    CMatrix x = basis.adjoint() * rho * basis;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (i != j) {
                worst = std::max(worst, std::abs(x(i, j)));
            }
        }
    }
    return worst;
}

void fill_pure(SaturationMatrices &out, const CVector &psi, const CVector &dpsi) {
    const auto d = psi.size();
    CVector perp = psi_perp(psi, dpsi);
    CMatrix m = psi * perp.adjoint() - perp * psi.adjoint();
    CMatrix id = CMatrix::Identity(d, d);
    // m is anti-Hermitian, so a Hermitian shift keeps the two conditions
    // <E|m|E> = 0 and |<E|psi>|^2 = 1/d independent.
    out.m_tilde = m + (projector(psi) - id / static_cast<double>(d));
    out.state_type = StateType::Pure;
    out.psi = psi;
    out.psi_perp = perp;
}

}  // namespace

SaturationMatrices build_saturation_matrices(const StateFamily &family, double theta, double rank_tol) {
    auto state = eval_state(family, theta);
    auto s = sld(state.rho, state.drho, rank_tol);
    SaturationMatrices out;
    out.m_set = m_set_from_sld(s);

    if (auto pe = eval_pure(family, theta)) {
        fill_pure(out, pe->psi, pe->dpsi);
        return out;
    }
    if (auto *r2 = std::get_if<RankTwoFixedBasis>(&family.variant())) {
        out.m_tilde = r2->psi0 * r2->psi1.adjoint();
        out.state_type = StateType::RankTwo;
        out.psi0 = r2->psi0;
        out.psi1 = r2->psi1;
        return out;
    }

    const auto rank = s.rank();
    if (rank == 1) {
        CVector psi = s.eigvecs.col(0);
        // For a pure rho, (1 - |psi><psi|) drho |psi> is the orthogonal part of |dpsi>.
        CVector dpsi = state.drho * psi;
        fill_pure(out, psi, dpsi);
        return out;
    }
    if (rank == 2) {
        const auto &mixed = std::get<MixedGeneric>(family.variant());
        std::vector<CMatrix> samples{state.rho, mixed.evaluator(theta + mixed.step), mixed.evaluator(theta - mixed.step)};
        // Pick the sample with the widest eigenvalue gap to define the basis.
        CMatrix basis;
        double best_gap = -1.0;
        for (const auto &rho : samples) {
            auto eig = herm_eig(rho);
            double gap = eig.values(0) - eig.values(1);
            if (gap > best_gap) {
                best_gap = gap;
                basis = eig.vectors;
            }
        }
        for (const auto &rho : samples) {
            if (max_offdiag_in_basis(rho, basis) > 1e-8) {
                throw ValidationError("rank-two family has a theta-dependent eigenbasis; no type (ii) construction");
            }
        }
        CVector psi0 = basis.col(0);
        CVector psi1 = basis.col(1);
        out.m_tilde = psi0 * psi1.adjoint();
        out.state_type = StateType::RankTwo;
        out.psi0 = psi0;
        out.psi1 = psi1;
        return out;
    }
    out.state_type = StateType::General;
    return out;
}

SaturationReport check_saturating(const Povm &povm, const StateFamily &family, double theta,
                                  const SaturationThresholds &thresholds) {
    povm.validate();
    auto state = eval_state(family, theta);
    if (povm.elements.front().rows() != state.rho.rows()) {
        throw ValidationError("check_saturating: POVM and state dimensions differ");
    }
    auto s = sld(state.rho, state.drho, thresholds.rank_tol);
    auto m_set = m_set_from_sld(s);
    const auto rank = s.rank();

    double m_scale = 0.0;
    for (const auto &m : m_set) {
        m_scale = std::max(m_scale, m.norm());
    }

    SaturationReport out;
    out.qfi = s.qfi;
    out.fi = fisher_info(povm, state.rho, state.drho, thresholds.p_tol);
    out.condition_threshold = thresholds.condition_rel * m_scale;
    out.regularity_threshold = thresholds.regularity_rel * s.L.norm();

    for (const auto &e : povm.elements) {
        CMatrix root = sqrt_psd(e);
        for (const auto &m : m_set) {
            out.condition_residual = std::max(out.condition_residual, (root * m * root).norm());
        }
        double p = (e * state.rho).trace().real();
        if (p < thresholds.p_tol) {
            for (Eigen::Index i = 0; i < rank; ++i) {
                out.regularity_residual = std::max(out.regularity_residual, (root * s.L * s.eigvecs.col(i)).norm());
            }
        }
    }
    out.saturating = out.condition_residual <= out.condition_threshold &&
                     out.regularity_residual <= out.regularity_threshold && out.qfi - out.fi <= thresholds.gap_rel * out.qfi;
    return out;
}

nlohmann::json to_json(const SaturationReport &r) {
    return {{"fi", r.fi},
            {"qfi", r.qfi},
            {"condition_residual", r.condition_residual},
            {"regularity_residual", r.regularity_residual},
            {"condition_threshold", r.condition_threshold},
            {"regularity_threshold", r.regularity_threshold},
            {"saturating", r.saturating}};
}

}  // namespace qcrb
