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
#include "qcrb/estimation.hpp"
#include "qcrb/scenarios.hpp"

using namespace qcrb;

namespace {

StateFamily binomial_family() {
    return StateFamily::rank_two(HilbertLayout({2}), CVector::Unit(2, 0), CVector::Unit(2, 1),
                                 [](double t) { return t; }, [](double) { return 1.0; }, ThetaDomain{0, 1, true});
}

std::vector<double> flattened_probs(const MeasurementTree &tree, const CMatrix &rho) {
    std::vector<double> p;
    for (const auto &l : leaves(tree)) p.push_back(l.vector.dot(rho * l.vector).real());
    return p;
}

}  // namespace

TEST(Sampler, ConditionalsReproduceFlattenedPovm) {
    std::mt19937_64 rng(61);
    for (auto dims : {std::vector<std::size_t>{2, 3}, {2, 2, 2}, {3, 2}}) {
        HilbertLayout l(dims);
        const auto d = static_cast<Eigen::Index>(l.total());
        auto fam = StateFamily::unitary_generator(l, oracle::random_state(d, rng), oracle::random_hermitian(d, rng));
        auto tree = synthesize_for_family(fam, 0.2);
        CMatrix rho = oracle::random_density(d, 3, rng);
        PathSampler s(tree, rho);
        auto got = s.leaf_probabilities();
        auto want = flattened_probs(tree, rho);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(Sampler, GhzTwoChiSquare) {
    auto s = scenario_ghz(2);
    const double r = 1 / std::sqrt(2.0);
    CMatrix h(2, 2);
    h << r, r, r, -r;
    auto tree = product_tree(s.family.layout(), {h, h}, {0, 1});
    CMatrix rho = density(s.family, 0.0);
    PathSampler sampler(tree, rho);
    SplitMix64 g(5);
    std::vector<double> obs(4, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) obs[sampler.sample_leaf(g)] += 1;
    EXPECT_GT(oracle::chi2_pvalue(obs, flattened_probs(tree, rho), n), 0.01);
}

TEST(Sampler, ConditionalMatchesFlatSamplingTwoSample) {
    std::mt19937_64 rng(62);
    HilbertLayout l({2, 3});
    auto fam = StateFamily::unitary_generator(l, oracle::random_state(6, rng), oracle::random_hermitian(6, rng));
    auto tree = synthesize_for_family(fam, 0.0);
    CMatrix rho = density(fam, 0.4);
    PathSampler sampler(tree, rho);
    auto probs = flattened_probs(tree, rho);
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    SplitMix64 g1(7), g2(8);
    std::vector<double> a(6, 0), b(6, 0);
    for (int i = 0; i < 100000; ++i) {
        a[sampler.sample_leaf(g1)] += 1;
        double u = g2.uniform() * cdf.back();
        b[static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin())] += 1;
    }
    EXPECT_GT(oracle::chi2_two_sample(a, b), 0.001);
}

TEST(Sampler, DeterministicPathForBasisState) {
    HilbertLayout l({2, 2});
    auto tree = product_tree(l, {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)}, {0, 1});
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(2, 2) = 1;  // |10>
    SplitMix64 g(1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_path(tree, rho, g), (std::vector<std::size_t>{1, 0}));
}

TEST(Sampler, ProductStateHasIndependentMarginals) {
    std::mt19937_64 rng(63);
    CMatrix a = oracle::random_density(2, 2, rng), b = oracle::random_density(3, 2, rng);
    auto tree = product_tree(HilbertLayout({2, 3}), {oracle::random_unitary(2, rng), oracle::random_unitary(3, rng)},
                             {0, 1});
    PathSampler s(tree, oracle::kron(a, b));
    auto p = s.leaf_probabilities();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double pi = p[i * 3] + p[i * 3 + 1] + p[i * 3 + 2];
            double pj = p[j] + p[3 + j];
            EXPECT_NEAR(p[i * 3 + j], pi * pj, 1e-12);
        }
}

TEST(Sampler, RejectsNonPositiveState) {
    HilbertLayout l({2});
    auto tree = product_tree(l, {CMatrix::Identity(2, 2)}, {0});
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    EXPECT_THROW(PathSampler(tree, bad), ValidationError);
}

TEST(Mle, BinomialClosedForm) {
    auto fam = binomial_family();
    auto tree = product_tree(HilbertLayout({2}), {CMatrix::Identity(2, 2)}, {0});
    auto r = mle(Counts{7, 3}, fam, tree, {0.0, 1.0});
    EXPECT_NEAR(r.theta, 0.7, 1e-8);
    EXPECT_FALSE(r.degenerate);
    std::map<std::string, std::uint64_t> named{{"0", 7}, {"1", 3}};
    EXPECT_NEAR(mle(named, fam, tree, {0.0, 1.0}).theta, 0.7, 1e-8);
    EXPECT_THROW(mle(std::map<std::string, std::uint64_t>{{"7", 1}}, fam, tree, {0.0, 1.0}), ValidationError);
}

TEST(Mle, FlatLikelihoodIsDegenerate) {
    auto s = load_scenario("phase");
    auto tree = product_tree(HilbertLayout({2}), {CMatrix::Identity(2, 2)}, {0});
    auto r = mle(Counts{500, 500}, s.family, tree, {0.0, 1.0});
    EXPECT_TRUE(r.degenerate);
    EXPECT_DOUBLE_EQ(r.theta, 0.5);
}

TEST(Mle, PhaseEstimatesConcentrate) {
    auto s = load_scenario("phase");
    auto tree = synthesize_for_family(s.family, 0.8);
    PathSampler sampler(tree, density(s.family, 0.8));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 g(seed);
        Counts c(2, 0);
        for (int i = 0; i < 100000; ++i) ++c[sampler.sample_leaf(g)];
        EXPECT_LT(std::abs(mle(c, s.family, tree, {0.0, 1.0}).theta - 0.8), 0.02);
    }
}

TEST(TwoStep, SplitArithmetic) {
    EXPECT_EQ(two_step_split(16).rough, 4u);
    EXPECT_EQ(two_step_split(16).refined, 12u);
    EXPECT_EQ(two_step_split(17).rough, 5u);
    EXPECT_EQ(two_step_split(10000).rough, 100u);
    EXPECT_THROW(two_step_split(15), ValidationError);
}

TEST(RunTrials, BoundaryTruthStaysInsideAndIsFlagged) {
    auto s = scenario_ghz(2);
    SimConfig cfg{s.family, 0.0, Strategy::FixedTree, 2000, 40, 3, {0.0, 1.0}, std::nullopt};
    auto rep = run_trials(cfg);
    for (double e : rep.estimates) {
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
    }
    EXPECT_GT(rep.boundary_trials, 0u);
}

TEST(RunTrials, ReproducibleBitForBit) {
    auto s = scenario_ghz(3);
    SimConfig cfg{s.family, 0.4, Strategy::TwoStep, 4000, 20, 99, {0.0, 1.0}, std::nullopt};
    auto a = to_json(run_trials(cfg)).dump();
    auto b = to_json(run_trials(cfg)).dump();
    EXPECT_EQ(a, b);
    cfg.seed = 100;
    EXPECT_NE(to_json(run_trials(cfg)).dump(), a);
}

TEST(RunTrials, NonInformativeMeasurementIsFlagged) {
    auto s = load_scenario("phase");
    auto tree = product_tree(HilbertLayout({2}), {CMatrix::Identity(2, 2)}, {0});
    SimConfig cfg{s.family, 0.37, Strategy::FixedTree, 1000, 20, 1, {0.0, 1.0}, tree};
    auto rep = run_trials(cfg);
    EXPECT_EQ(rep.degenerate_trials, 20u);
    EXPECT_FALSE(rep.informative);
    EXPECT_FALSE(std::isfinite(rep.ratio));
    EXPECT_TRUE(to_json(rep)["ratio"].is_null());
}

TEST(RunTrials, RatioStableAcrossShots) {
    // Var ~ 1/N: r at N and 4N agree within sampling error (200 trials, se ~ 10%)
    auto s = scenario_ghz(2);
    SimConfig cfg{s.family, 0.5, Strategy::FixedTree, 10000, 200, 11, {0.0, 1.0}, std::nullopt};
    auto r1 = run_trials(cfg);
    cfg.shots = 40000;
    auto r2 = run_trials(cfg);
    EXPECT_GT(r1.ratio, 0.7);
    EXPECT_LT(r1.ratio, 1.3);
    EXPECT_GT(r2.ratio, 0.7);
    EXPECT_LT(r2.ratio, 1.3);
    EXPECT_LE(r1.ci95_lo, r1.ratio);
    EXPECT_GE(r1.ci95_hi, r1.ratio);
}

TEST(RunTrials, NonSaturatingButInformativeMeasurementFollowsItsFisherInfo) {
    // tilted product basis on the phase qubit: FI < QFI, N FI Var ~ 1
    auto s = load_scenario("phase");
    const double a = 0.6;
    CMatrix b(2, 2);
    b << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    CMatrix had(2, 2);
    had << 1, 1, Complex(0, 1), Complex(0, -1);
    had /= std::sqrt(2.0);
    auto tree = product_tree(HilbertLayout({2}), {had * b}, {0});
    SimConfig cfg{s.family, 0.5, Strategy::FixedTree, 20000, 200, 5, {0.0, 1.0}, tree};
    auto rep = run_trials(cfg);
    ASSERT_TRUE(rep.fi);
    EXPECT_LT(*rep.fi, rep.qfi * 0.99);
    double nfv = static_cast<double>(cfg.shots) * *rep.fi * rep.variance;
    EXPECT_GT(nfv, 0.7);
    EXPECT_LT(nfv, 1.3);
}

TEST(RunTrials, RejectsBadConfig) {
    auto s = scenario_ghz(2);
    SimConfig cfg{s.family, 2.0, Strategy::FixedTree, 100, 10, 1, {0.0, 1.0}, std::nullopt};
    EXPECT_THROW(run_trials(cfg), ValidationError);
    cfg.theta_true = 0.5;
    cfg.shots = 0;
    EXPECT_THROW(run_trials(cfg), ValidationError);
    cfg.shots = 10;
    cfg.strategy = Strategy::TwoStep;
    EXPECT_THROW(run_trials(cfg), ValidationError);
}
