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

#include "oracles.hpp"
#include "qcrb/errors.hpp"
#include "qcrb/tensor.hpp"

using namespace qcrb;

TEST(Layout, DigitsRoundTrip) {
    HilbertLayout l({2, 3, 4});
    EXPECT_EQ(l.total(), 24u);
    for (std::size_t i = 0; i < l.total(); ++i) {
        auto d = l.digits(i);
        EXPECT_EQ(l.index(d), i);
    }
    // big-endian: first subsystem is the slowest digit
    EXPECT_EQ(l.digits(12), (std::vector<std::size_t>{1, 0, 0}));
}

TEST(Layout, RejectsBadDims) {
    EXPECT_THROW(HilbertLayout(std::vector<std::size_t>{}), ValidationError);
    EXPECT_THROW(HilbertLayout({2, 1}), ValidationError);
    EXPECT_EQ(HilbertLayout::qubits(3).total(), 8u);
    EXPECT_EQ(HilbertLayout({2, 3, 4}).without(1).dims(), (std::vector<std::size_t>{2, 4}));
}

TEST(Kron, MatchesEntryFormula) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        CMatrix a = oracle::random_hermitian(2 + t % 2, rng);
        CMatrix b = oracle::random_unitary(3, rng);
        EXPECT_LT((kron(a, b) - oracle::kron(a, b)).norm(), 1e-12);
    }
}

TEST(PartialTrace, MatchesIndexContraction) {
    std::mt19937_64 rng(12);
    std::vector<std::size_t> dims{2, 3, 2};
    HilbertLayout l(dims);
    CMatrix m = oracle::random_density(12, 4, rng) + oracle::random_hermitian(12, rng) * Complex(0.1, 0.2);
    for (unsigned mask = 0; mask < 8; ++mask) {
        std::vector<bool> keep(3);
        std::vector<std::size_t> discard;
        for (std::size_t k = 0; k < 3; ++k) {
            keep[k] = (mask >> k) & 1u;
            if (!keep[k]) discard.push_back(k);
        }
        if (discard.size() == 3) continue;
        CMatrix got = partial_trace(m, l, discard);
        CMatrix want = oracle::partial_trace(m, dims, keep);
        ASSERT_EQ(got.rows(), want.rows());
        EXPECT_LT((got - want).norm(), 1e-12) << "mask " << mask;
    }
}

TEST(PartialTrace, ProductFactorizes) {
    std::mt19937_64 rng(13);
    CMatrix a = oracle::random_density(2, 2, rng), b = oracle::random_density(3, 2, rng);
    HilbertLayout l({2, 3});
    std::vector<std::size_t> d1{1}, d0{0};
    EXPECT_LT((partial_trace(kron(a, b), l, d1) - a).norm(), 1e-12);
    EXPECT_LT((partial_trace(kron(a, b), l, d0) - b).norm(), 1e-12);
}

TEST(PartialTrace, RejectsBadInput) {
    HilbertLayout l({2, 2});
    std::vector<std::size_t> bad{2};
    EXPECT_THROW(partial_trace(CMatrix::Identity(4, 4), l, bad), ValidationError);
    std::vector<std::size_t> ok{0};
    EXPECT_THROW(partial_trace(CMatrix::Identity(3, 3), l, ok), ValidationError);
}

TEST(Sandwich, MatchesExplicitContraction) {
    std::mt19937_64 rng(14);
    std::vector<std::size_t> dims{3, 2, 2};
    HilbertLayout l(dims);
    CMatrix m = oracle::random_hermitian(12, rng);
    for (std::size_t k = 0; k < 3; ++k) {
        CVector v = oracle::random_state(static_cast<Eigen::Index>(dims[k]), rng);
        CMatrix got = sandwich(m, l, k, v);
        // (<v| on k) m (|v> on k) by summing over the k digits
        std::vector<std::size_t> rest;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != k) rest.push_back(dims[j]);
        CMatrix want = CMatrix::Zero(got.rows(), got.cols());
        for (std::size_t r = 0; r < 12; ++r) {
            auto dr = oracle::digits(r, dims);
            for (std::size_t c = 0; c < 12; ++c) {
                auto dc = oracle::digits(c, dims);
                std::vector<std::size_t> rr, cc;
                for (std::size_t j = 0; j < 3; ++j)
                    if (j != k) rr.push_back(dr[j]), cc.push_back(dc[j]);
                want(static_cast<Eigen::Index>(oracle::flat(rr, rest)), static_cast<Eigen::Index>(oracle::flat(cc, rest))) +=
                    std::conj(v(static_cast<Eigen::Index>(dr[k]))) * m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                    v(static_cast<Eigen::Index>(dc[k]));
            }
        }
        EXPECT_LT((got - want).norm(), 1e-12) << "k " << k;
    }
    EXPECT_THROW(sandwich(m, l, 0, CVector::Ones(3)), ValidationError);
}

TEST(HermEig, ReconstructsDescending) {
    std::mt19937_64 rng(15);
    CMatrix h = oracle::random_hermitian(6, rng);
    auto e = herm_eig(h);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) EXPECT_GE(e.values(i - 1), e.values(i));
    EXPECT_LT((e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - h).norm(), 1e-10);
    CMatrix nh = h;
    nh(0, 1) += 0.5;
    EXPECT_THROW(herm_eig(nh), ValidationError);
}

TEST(SqrtPsd, SquaresBack) {
    std::mt19937_64 rng(16);
    CMatrix r = oracle::random_density(5, 3, rng);
    CMatrix s = sqrt_psd(r);
    EXPECT_LT((s * s - r).norm(), 1e-10);
    EXPECT_THROW(sqrt_psd(-CMatrix::Identity(2, 2)), ValidationError);
    // a rank-one projector is its own square root, no noise blow-up
    CVector v = oracle::random_state(4, rng);
    CMatrix p = v * v.adjoint();
    EXPECT_LT((sqrt_psd(p) - p).norm(), 1e-12);
}

TEST(UnitaryExp, GroupLaw) {
    std::mt19937_64 rng(17);
    CMatrix h = oracle::random_hermitian(4, rng);
    CMatrix u = unitary_exp(h, 0.3);
    EXPECT_LT((u.adjoint() * u - CMatrix::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LT((unitary_exp(h, 0.1) * unitary_exp(h, 0.2) - u).norm(), 1e-12);
    // derivative at 0 is -iH
    double t = 1e-6;
    CMatrix d = (unitary_exp(h, t) - unitary_exp(h, -t)) / (2 * t);
    EXPECT_LT((d + Complex(0, 1) * h).norm(), 1e-8);
}

TEST(Json, MatrixRoundTrip) {
    std::mt19937_64 rng(18);
    CMatrix m = oracle::random_unitary(3, rng);
    EXPECT_EQ(matrix_from_json(to_json(m)), m);
    CVector v = oracle::random_state(5, rng);
    EXPECT_EQ(vector_from_json(to_json(v)), v);
    EXPECT_EQ(matrix_from_json(nlohmann::json::parse("[[1, 0], [0, 1]]")), CMatrix::Identity(2, 2));
    EXPECT_THROW(matrix_from_json(nlohmann::json::parse("[[1, 0], [0]]")), ValidationError);
}
