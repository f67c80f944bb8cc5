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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcrb/locc.hpp"
#include "qcrb/metrology.hpp"
#include "qcrb/rng.hpp"

namespace qcrb {

/// Conditional outcome sampler for a fixed tree and state. Each node stores
/// the distribution of its outcome given the outcomes above it, so one shot
/// is a root-to-leaf walk, exactly as the adaptive protocol runs.
class PathSampler {
   public:
    PathSampler(const MeasurementTree &tree, const CMatrix &rho);

    std::vector<std::size_t> sample(SplitMix64 &rng) const;
    /// Index of the sampled leaf in `leaves(tree)` order.
    std::size_t sample_leaf(SplitMix64 &rng) const;

    std::size_t num_leaves() const noexcept {
        return num_leaves_;
    }
    /// Joint path probabilities implied by the conditionals, in leaf order.
    std::vector<double> leaf_probabilities() const;

   private:
    struct Node {
        std::vector<double> cdf;
        std::vector<int> children;
    };
    std::vector<Node> nodes_;
    std::vector<std::size_t> radices_;
    std::size_t num_leaves_ = 0;

    int build(const MeasurementTree &tree, const TreeNode &node, const CMatrix &cond,
              const std::vector<std::size_t> &remaining);
};

std::vector<std::size_t> sample_path(const MeasurementTree &tree, const CMatrix &rho, SplitMix64 &rng);

/// Outcome counts indexed like `leaves(tree)`.
using Counts = std::vector<std::uint64_t>;

struct PriorInterval {
    double lo = 0.0;
    double hi = 1.0;
};

struct MleResult {
    double theta = 0.0;
    double log_likelihood = 0.0;
    bool degenerate = false;   // likelihood flat over the prior
    bool at_boundary = false;  // maximum sits on a prior endpoint
};

inline constexpr int kMleGridPoints = 512;

MleResult mle(const Counts &counts, const StateFamily &family, const MeasurementTree &tree, const PriorInterval &prior);
MleResult mle(const std::map<std::string, std::uint64_t> &counts, const StateFamily &family, const MeasurementTree &tree,
              const PriorInterval &prior);

enum class Strategy { FixedTree, TwoStep };

struct SimConfig {
    StateFamily family;
    double theta_true = 0.0;
    Strategy strategy = Strategy::FixedTree;
    std::uint64_t shots = 1000;
    std::uint64_t trials = 100;
    std::uint64_t seed = 1;
    PriorInterval prior;
    /// Measurement for the fixed strategy; synthesized at theta_true if unset.
    std::optional<MeasurementTree> tree;
};

struct TwoStepSplit {
    std::uint64_t rough;
    std::uint64_t refined;
};

TwoStepSplit two_step_split(std::uint64_t shots);

struct TwoStepResult {
    double theta = 0.0;
    double rough_theta = 0.0;
    bool at_boundary = false;
    bool degenerate = false;
};

TwoStepResult two_step(const SimConfig &config, SplitMix64 &rng);

struct SimReport {
    double theta_true = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string strategy;
    std::vector<double> estimates;
    double mean = 0.0;
    double variance = 0.0;
    double qfi = 0.0;
    std::optional<double> fi;  // of the fixed tree at theta_true
    double ratio = 0.0;         // N * J * Var
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    std::uint64_t degenerate_trials = 0;
    std::uint64_t boundary_trials = 0;
    bool informative = true;
};

SimReport run_trials(const SimConfig &config);

nlohmann::json to_json(const SimReport &report);

}  // namespace qcrb
