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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcrb/metrology.hpp"
#include "qcrb/tensor.hpp"

namespace qcrb {

/// One measurement stage of an adaptive (one-way LOCC) protocol. Child x is
/// the stage that follows outcome x of this node.
struct TreeNode {
    std::size_t subsystem = 0;
    std::vector<CVector> basis;
    std::vector<TreeNode> children;
};

struct MeasurementTree {
    HilbertLayout layout;
    std::vector<std::size_t> order;
    TreeNode root;

    /// Throws ValidationError if the node bases are not orthonormal or the
    /// shape does not follow `order`.
    void validate() const;
};

/// Product vector for one root-to-leaf path, in layout order.
struct Leaf {
    std::vector<std::size_t> path;
    CVector vector;
};

std::string path_label(const std::vector<std::size_t> &path);

std::vector<std::size_t> default_order(const HilbertLayout &layout);

/// Builds an adaptive rank-one protocol whose leaves all satisfy <E|M|E> = 0
/// for the traceless full-space matrix `m_tilde`.
MeasurementTree synthesize_tree(const CMatrix &m_tilde, const HilbertLayout &layout,
                                const std::vector<std::size_t> &order);

/// Non-adaptive tree that applies `local_bases[k]` (columns) to subsystem k.
MeasurementTree product_tree(const HilbertLayout &layout, const std::vector<CMatrix> &local_bases,
                             const std::vector<std::size_t> &order);

std::vector<Leaf> leaves(const MeasurementTree &tree);
Povm flatten(const MeasurementTree &tree);

/// max over leaves of |<E|M|E>|.
double leaf_residual(const MeasurementTree &tree, const CMatrix &m);

/// Tree for the saturation matrix of `family` at theta.
MeasurementTree synthesize_for_family(const StateFamily &family, double theta,
                                      const std::optional<std::vector<std::size_t>> &order = std::nullopt);

SaturationReport verify_tree(const MeasurementTree &tree, const StateFamily &family, double theta,
                             const SaturationThresholds &thresholds = {});

struct DiscriminationReport {
    double success_prob = 0.0;
    std::map<std::string, int> leaf_assignment;
    double residual = 0.0;
};

struct Discrimination {
    MeasurementTree tree;
    DiscriminationReport report;
};

/// Perfect one-way LOCC discrimination of two orthogonal pure states with
/// equal priors.
Discrimination discriminate(const StateVector &psi0, const StateVector &psi1,
                            const std::optional<std::vector<std::size_t>> &order = std::nullopt);

DiscriminationReport discrimination_report(const MeasurementTree &tree, const CVector &psi0, const CVector &psi1);

nlohmann::json tree_to_json(const MeasurementTree &tree);
MeasurementTree tree_from_json(const nlohmann::json &j);

/// One Bloch-sphere point per qubit node: the first basis vector's
/// (<sx>, <sy>, <sz>).
struct BlochRow {
    double theta = 0.0;
    std::string path;
    std::size_t subsystem = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

std::vector<BlochRow> bloch_rows(const MeasurementTree &tree, double theta);
std::string bloch_csv(const std::vector<BlochRow> &rows);

}  // namespace qcrb
