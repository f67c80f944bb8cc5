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

#include <fstream>

#include "oracles.hpp"
#include "qcrb/errors.hpp"
#include "qcrb/locc.hpp"
#include "qcrb/scenarios.hpp"

using namespace qcrb;

TEST(Pauli, BuildsKnownMatrices) {
    CMatrix xx = pauli_hamiltonian({{1.0, "XX"}}, 2);
    CMatrix want = CMatrix::Zero(4, 4);
    want(0, 3) = want(3, 0) = want(1, 2) = want(2, 1) = 1;
    EXPECT_LT((xx - want).norm(), 1e-15);
    CMatrix zi = pauli_hamiltonian({{0.5, "ZI"}, {0.5, "IZ"}}, 2);
    EXPECT_LT((zi - CMatrix(RVector((Eigen::VectorXd(4) << 1, 0, 0, -1).finished()).cast<Complex>().asDiagonal())).norm(),
              1e-15);
    CMatrix y = pauli_hamiltonian({{1.0, "Y"}}, 1);
    EXPECT_EQ(y(0, 1), Complex(0, -1));
    EXPECT_THROW(pauli_hamiltonian({{1.0, "XQ"}}, 2), ValidationError);
    EXPECT_THROW(pauli_hamiltonian({{1.0, "X"}}, 2), ValidationError);
}

TEST(Grid, InclusiveUniform) {
    auto g = uniform_grid(0.0, 1.0, 5);
    EXPECT_EQ(g, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
    EXPECT_EQ(uniform_grid(0.3, 0.3, 1), (std::vector<double>{0.3}));
    EXPECT_THROW(uniform_grid(1.0, 0.0, 3), ValidationError);
    EXPECT_THROW(uniform_grid(0.0, 1.0, 0), ValidationError);
}

TEST(Scenarios, BuiltinsLoadAndRoundTrip) {
    for (const auto &name : builtin_scenario_names()) {
        auto s = load_scenario(name);
        EXPECT_EQ(s.name, name);
        auto j1 = scenario_to_json(s);
        auto j2 = scenario_to_json(scenario_from_json(j1));
        EXPECT_EQ(j1, j2) << name;
        EXPECT_EQ(j1.dump(), scenario_to_json(scenario_from_json(nlohmann::json::parse(j1.dump()))).dump());
    }
}

TEST(Scenarios, GhzQfiIsNSquared) {
    for (int n = 2; n <= 8; ++n) {
        auto s = scenario_ghz(n);
        for (double t : {0.0, 0.4, 0.9}) EXPECT_NEAR(qfi(s.family, t), n * n, 1e-8 * n * n);
    }
    EXPECT_THROW(scenario_ghz(1), ValidationError);
    EXPECT_THROW(scenario_ghz(9), ValidationError);
}

TEST(Scenarios, GhzStateHasRelativePhase) {
    auto s = scenario_ghz(3);
    auto psi = *pure_state(s.family, 0.3);
    Complex rel = psi(7) / psi(0);
    EXPECT_NEAR(std::arg(rel), 0.9, 1e-12);
    EXPECT_NEAR(std::abs(rel), 1.0, 1e-12);
}

TEST(Scenarios, RankTwoBellQfi) {
    auto s = load_scenario("ranktwo-bell");
    for (double t : s.theta_grid) EXPECT_NEAR(qfi(s.family, t), 1.0 / (t * (1 - t)), 1e-8 / (t * (1 - t)));
    auto tree = synthesize_for_family(s.family, 0.3);
    EXPECT_TRUE(verify_tree(tree, s.family, 0.3).saturating);
}

TEST(Scenarios, RankTwoBuilder) {
    const double r = 1 / std::sqrt(2.0);
    CVector a(4), b(4);
    a << r, 0, 0, r;
    b << 0, r, r, 0;
    auto s = scenario_ranktwo(a, b, 0.0, 1.0, HilbertLayout({2, 2}));
    EXPECT_NEAR(qfi(s.family, 0.5), 4.0, 1e-10);
    auto flat = scenario_ranktwo(a, b, 0.3, 0.0, HilbertLayout({2, 2}));
    EXPECT_NEAR(qfi(flat.family, 0.5), 0.0, 1e-14);
    EXPECT_THROW(synthesize_for_family(flat.family, 0.5), ValidationError);
    EXPECT_THROW(scenario_ranktwo(a, a, 0.0, 1.0, HilbertLayout({2, 2})), ValidationError);
}

TEST(Scenarios, Chain4Shape) {
    auto s = scenario_chain4();
    EXPECT_EQ(s.theta_grid.size(), 32u);
    EXPECT_DOUBLE_EQ(s.theta_grid.back(), std::numbers::pi / 4);
    EXPECT_THROW(eval_state(s.family, 1.0), ValidationError);
}

TEST(Scenarios, Cos2WeightAndExplicitGrid) {
    nlohmann::json j = {{"name", "thermo"},
                        {"type", "rank-two"},
                        {"layout", {2}},
                        {"psi0", {1, 0}},
                        {"psi1", {0, 1}},
                        {"p", {{"form", "cos2"}, {"freq", 1.0}, {"phase", 0.0}}},
                        {"theta_grid", {0.3, 0.6}}};
    auto s = scenario_from_json(j);
    EXPECT_EQ(s.theta_grid.size(), 2u);
    // p = cos^2 t gives QFI 4 everywhere inside (0, pi/2)
    EXPECT_NEAR(qfi(s.family, 0.6), 4.0, 1e-10);
    EXPECT_DOUBLE_EQ(s.prior.lo, 0.3);
}

TEST(Scenarios, MalformedDescriptions) {
    auto base = *builtin_scenario_json("phase");
    auto bad = base;
    bad["type"] = "quantum-magic";
    EXPECT_THROW(scenario_from_json(bad), ValidationError);
    bad = base;
    bad.erase("psi_in");
    EXPECT_THROW(scenario_from_json(bad), ValidationError);
    bad = base;
    bad["layout"] = {2, 2};
    EXPECT_THROW(scenario_from_json(bad), ValidationError);
    bad = base;
    bad["hamiltonian"] = {{{"coeff", 1.0}, {"string", "ZZ"}}};
    EXPECT_THROW(scenario_from_json(bad), ValidationError);
    auto bm = *builtin_scenario_json("bell-mixture");
    bm["theta_grid"] = {0.0, 0.5};
    EXPECT_THROW(scenario_from_json(bm), ValidationError);
}

TEST(Scenarios, LoadsFromFile) {
    auto path = std::string(::testing::TempDir()) + "/scn.json";
    {
        std::ofstream f(path);
        f << builtin_scenario_json("ghz2")->dump();
    }
    EXPECT_EQ(load_scenario(path).name, "ghz2");
    {
        std::ofstream f(path);
        f << "{ not json";
    }
    EXPECT_THROW(load_scenario(path), ValidationError);
    EXPECT_THROW(load_scenario("/nonexistent/file.json"), ValidationError);
}
