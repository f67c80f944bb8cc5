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

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcrb/tensor.hpp"

namespace qcrb {

inline constexpr double kRankTol = 1e-9;
inline constexpr double kProbTol = 1e-12;

/// Interval of admissible parameter values, closed unless `open` is set.
struct ThetaDomain {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool open = false;

    bool contains(double theta) const {
        return open ? (theta > lo && theta < hi) : (theta >= lo && theta <= hi);
    }
};

/// psi(theta) = exp(-i theta G) psi_in.
struct UnitaryGenerator {
    HilbertLayout layout;
    CVector psi_in;
    CMatrix generator;
    ThetaDomain domain;
    HermEig generator_eig;
};

/// Pure family given by a state evaluator; derivatives by central differences.
struct PureNumeric {
    HilbertLayout layout;
    std::function<CVector(double)> evaluator;
    double step = 1e-5;
    ThetaDomain domain;
};

/// rho = p |psi0><psi0| + (1 - p) |psi1><psi1| with a fixed eigenbasis.
struct RankTwoFixedBasis {
    HilbertLayout layout;
    CVector psi0;
    CVector psi1;
    std::function<double(double)> p;
    std::function<double(double)> dp;
    ThetaDomain domain;
};

/// Arbitrary density-matrix family; derivatives by central differences.
struct MixedGeneric {
    HilbertLayout layout;
    std::function<CMatrix(double)> evaluator;
    double step = 1e-5;
    ThetaDomain domain;
    std::function<CMatrix(double)> derivative;  // optional, exact d rho / d theta
};

class StateFamily {
   public:
    using Variant = std::variant<UnitaryGenerator, PureNumeric, RankTwoFixedBasis, MixedGeneric>;

    static StateFamily unitary_generator(HilbertLayout layout, CVector psi_in, CMatrix generator, ThetaDomain domain = {});
    static StateFamily pure_numeric(HilbertLayout layout, std::function<CVector(double)> evaluator, double step = 1e-5,
                                    ThetaDomain domain = {});
    static StateFamily rank_two(HilbertLayout layout, CVector psi0, CVector psi1, std::function<double(double)> p,
                                std::function<double(double)> dp, ThetaDomain domain = {});
    static StateFamily mixed(HilbertLayout layout, std::function<CMatrix(double)> evaluator, double step = 1e-5,
                             ThetaDomain domain = {}, std::function<CMatrix(double)> derivative = {});

    const Variant &variant() const noexcept {
        return v_;
    }
    const HilbertLayout &layout() const;
    const ThetaDomain &domain() const;
    bool is_pure() const;
    std::string kind() const;

   private:
    explicit StateFamily(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

struct StateEval {
    CMatrix rho;
    CMatrix drho;
};

struct PureEval {
    CVector psi;
    CVector dpsi;
};

StateEval eval_state(const StateFamily &family, double theta);

/// State only, without the derivative (no extra evaluations off theta).
CMatrix density(const StateFamily &family, double theta);
std::optional<CVector> pure_state(const StateFamily &family, double theta);

/// State vector and its derivative for pure families; nullopt otherwise.
std::optional<PureEval> eval_pure(const StateFamily &family, double theta);

struct SldResult {
    CMatrix L;
    RVector eigvals;   // descending, as produced by herm_eig
    CMatrix eigvecs;   // columns
    double qfi = 0.0;
    double rank_tol = kRankTol;

    /// Number of eigenvalues above rank_tol (they come first).
    Eigen::Index rank() const;
};

SldResult sld(const CMatrix &rho, const CMatrix &drho, double rank_tol = kRankTol);

double qfi(const StateFamily &family, double theta);

/// Finite list of PSD operators summing to the identity.
struct Povm {
    std::vector<CMatrix> elements;
    std::vector<std::string> labels;

    /// Throws ValidationError unless every element is PSD (>= -1e-9) and the
    /// elements sum to the identity within 1e-8.
    void validate() const;
    std::size_t size() const noexcept {
        return elements.size();
    }
};

/// Rank-one projective measurement onto the columns of an orthonormal basis.
Povm povm_from_basis(const CMatrix &basis);

double fisher_info(const Povm &povm, const CMatrix &rho, const CMatrix &drho, double p_tol = kProbTol);

/// (1 - |psi><psi|) |dpsi>.
CVector psi_perp(const CVector &psi, const CVector &dpsi);

enum class StateType { Pure, RankTwo, General };

std::string to_string(StateType t);

struct SaturationMatrices {
    std::vector<CMatrix> m_set;
    std::optional<CMatrix> m_tilde;
    StateType state_type = StateType::General;
    std::optional<CVector> psi;
    std::optional<CVector> psi_perp;
    std::optional<CVector> psi0;
    std::optional<CVector> psi1;
};

SaturationMatrices build_saturation_matrices(const StateFamily &family, double theta, double rank_tol = kRankTol);

struct SaturationThresholds {
    double condition_rel = 1e-7;  // times max ||M_ij||
    double regularity_rel = 1e-7; // times ||L||
    double gap_rel = 1e-6;        // times QFI
    double p_tol = kProbTol;
    double rank_tol = kRankTol;
};

struct SaturationReport {
    double fi = 0.0;
    double qfi = 0.0;
    double condition_residual = 0.0;
    double regularity_residual = 0.0;
    double condition_threshold = 0.0;
    double regularity_threshold = 0.0;
    bool saturating = false;
};

SaturationReport check_saturating(const Povm &povm, const StateFamily &family, double theta,
                                  const SaturationThresholds &thresholds = {});

nlohmann::json to_json(const SaturationReport &report);

}  // namespace qcrb
