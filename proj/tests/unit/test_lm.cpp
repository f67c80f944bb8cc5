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

#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qcrb/errors.hpp"
#include "qcrb/lm.hpp"
#include "qcrb/scenarios.hpp"

using namespace qcrb;
using namespace qcrb::lm;

namespace {

constexpr double kPi = std::numbers::pi;

BipartiteCoeffs lm_pair3() {
    const double r = std::sqrt(2.0) / 2;
    CMatrix a = CMatrix::Zero(3, 3), b = CMatrix::Zero(3, 3);
    a.diagonal() << r, 0.5, 0.5;
    b.diagonal() << Complex(0, r), Complex(0, -0.5), Complex(0, -0.5);
    return {a, b};
}

IsometryPair explicit_pair() {
    const double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0), s2 = std::sqrt(2.0);
    CMatrix u(3, 3), v(3, 4);
    u << 1 / s3, 1 / s3, 1 / s3, s2 / s3, -1 / s6, -1 / s6, 0, Complex(0, -1 / s2), Complex(0, 1 / s2);
    auto e = [](double a) { return std::polar(0.5, a); };
    v << e(kPi / 4), e(3 * kPi / 4), -e(kPi / 4), -e(3 * kPi / 4), 0.5, 0.5, 0.5, 0.5, 0.5, -0.5, 0.5, -0.5;
    return {u, v};
}

StateFamily random_bipartite(std::size_t d1, std::size_t d2, std::mt19937_64 &rng) {
    const auto d = static_cast<Eigen::Index>(d1 * d2);
    return StateFamily::unitary_generator(HilbertLayout({d1, d2}), oracle::random_state(d, rng),
                                          oracle::random_hermitian(d, rng));
}

}  // namespace

TEST(Lm, ExplicitPairSatisfiesBothConditions) {
    auto pair = explicit_pair();
    EXPECT_NO_THROW(pair.validate());
    EXPECT_FALSE(pair.is_projective());
    auto rep = check_lm_conditions(lm_pair3(), pair);
    EXPECT_LT(rep.phase_residual, 1e-10);
    EXPECT_LT(rep.support_residual, 1e-10);
    EXPECT_TRUE(rep.feasible);
    EXPECT_FALSE(rep.projective);
}

TEST(Lm, ExplicitPairPovmSaturatesPair3Family) {
    auto s = load_scenario("lm-pair3");
    auto c = coefficients_for_family(s.family, 0.0);
    EXPECT_LT((c.a_mat - lm_pair3().a_mat).norm(), 1e-12);
    EXPECT_LT((c.b_mat - lm_pair3().b_mat).norm(), 1e-12);
    auto povm = lm_povm_from_pair(explicit_pair());
    EXPECT_EQ(povm.size(), 12u);
    auto rep = check_saturating(povm, s.family, 0.0);
    EXPECT_TRUE(rep.saturating);
    EXPECT_NEAR(rep.fi, 4.0, 1e-9);
}

TEST(Lm, Construct2xdMeetsPhaseCondition) {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 30; ++t) {
        std::size_t d2 = 2 + static_cast<std::size_t>(t % 3);
        auto fam = random_bipartite(2, d2, rng);
        auto c = coefficients_for_family(fam, 0.1);
        auto pair = construct_lm_2xd(c);
        EXPECT_TRUE(pair.is_projective());
        auto rep = check_lm_conditions(c, pair);
        EXPECT_LT(rep.phase_residual, 1e-8);
        // targets used for V are traceless
        CMatrix u = pair.u_mat;
        for (int i = 0; i < 2; ++i) {
            CMatrix pi = u.col(i) * u.col(i).adjoint();
            CMatrix target = Complex(0, -1) * (c.b_mat.adjoint() * pi * c.a_mat - c.a_mat.adjoint() * pi * c.b_mat);
            EXPECT_LT(std::abs(target.trace()), 1e-10);
        }
    }
}

TEST(Lm, ResidualsAgreeWithDirectPovmCheck) {
    std::mt19937_64 rng(52);
    for (int t = 0; t < 50; ++t) {
        auto fam = random_bipartite(2, 2 + static_cast<std::size_t>(t % 2), rng);
        auto c = coefficients_for_family(fam, 0.0);
        // constructed pair: phase condition holds, so the POVM meets the
        // null-space condition whatever the support says
        auto pair = construct_lm_2xd(c);
        auto lm_rep = check_lm_conditions(c, pair);
        auto sat = check_saturating(lm_povm_from_pair(pair), fam, 0.0);
        EXPECT_LT(sat.condition_residual, sat.condition_threshold);
        EXPECT_EQ(lm_rep.feasible, sat.saturating) << "instance " << t;
        // random pair: both views report a violation
        IsometryPair rnd{oracle::random_unitary(2, rng), oracle::random_unitary(c.b_mat.cols(), rng)};
        auto r2 = check_lm_conditions(c, rnd);
        auto s2 = check_saturating(lm_povm_from_pair(rnd), fam, 0.0);
        EXPECT_EQ(r2.feasible, s2.saturating);
        EXPECT_GT(r2.phase_residual, 1e-6);
        EXPECT_GT(s2.condition_residual, s2.condition_threshold);
    }
}

TEST(Lm, NegativeControlFailsSupport) {
    CMatrix a = CMatrix::Identity(2, 2) / 2.0;
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    CMatrix b = std::polar(0.5, kPi / 4) * sx;
    auto pair = construct_lm_2xd({a, b});
    auto rep = check_lm_conditions({a, b}, pair);
    EXPECT_LT(rep.phase_residual, 1e-8);
    EXPECT_GT(rep.support_residual, 0.1);
    EXPECT_FALSE(rep.feasible);
}

TEST(Lm, Pair2RotatedBasisSaturatesWithoutDiscriminating) {
    auto s = load_scenario("lm-pair2");
    const double c = std::cos(kPi / 8), sn = std::sin(kPi / 8);
    CMatrix v(2, 2);
    v << c, -sn, sn, c;
    // second-party vectors enter V conjugated; these are real
    IsometryPair pair{CMatrix::Identity(2, 2), v};
    auto coeffs = coefficients_for_family(s.family, 0.0);
    EXPECT_TRUE(check_lm_conditions(coeffs, pair).feasible);
    auto povm = lm_povm_from_pair(pair);
    EXPECT_TRUE(check_saturating(povm, s.family, 0.0).saturating);
    auto sm = build_saturation_matrices(s.family, 0.0);
    for (const auto &e : povm.elements) {
        EXPECT_GT(sm.psi->dot(e * *sm.psi).real(), 1e-3);
        EXPECT_GT(sm.psi_perp->dot(e * *sm.psi_perp).real(), 1e-3);
    }
}

TEST(Lm, SearchFindsPaddedPairForPair3) {
    SearchOptions opt;
    opt.restarts = 20;
    auto res = heuristic_lm_search(lm_pair3(), opt);
    EXPECT_TRUE(res.report.feasible);
    EXPECT_EQ(res.best.v_mat.cols(), 4);
    EXPECT_TRUE(res.evidence_only);
    auto again = heuristic_lm_search(lm_pair3(), opt);
    EXPECT_EQ(again.best.u_mat, res.best.u_mat);
    EXPECT_EQ(again.restarts_run, res.restarts_run);
}

TEST(Lm, SearchSolvesEasyProjectiveCase) {
    auto s = load_scenario("lm-pair2");
    SearchOptions opt;
    opt.allow_isometry_padding = false;
    opt.pad_cols = 0;
    opt.restarts = 20;
    auto res = heuristic_lm_search(coefficients_for_family(s.family, 0.0), opt);
    EXPECT_TRUE(res.report.feasible);
    EXPECT_TRUE(res.report.projective);
}

TEST(Lm, ValidatesShapes) {
    IsometryPair bad{CMatrix::Identity(2, 2) * 2.0, CMatrix::Identity(2, 2)};
    EXPECT_THROW(bad.validate(), ValidationError);
    EXPECT_THROW(construct_lm_2xd(lm_pair3()), ValidationError);
    EXPECT_THROW(check_lm_conditions(lm_pair3(), IsometryPair{CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}),
                 ValidationError);
}
