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

#include "qcrb/locc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "qcrb/errors.hpp"
#include "qcrb/zerodiag.hpp"

namespace qcrb {

namespace {

// Below this fraction of |M~| a node operator is treated as exactly zero.
constexpr double kNegligible = 1e-12;

void check_order(const HilbertLayout &layout, const std::vector<std::size_t> &order) {
    if (order.size() != layout.size()) {
        throw ValidationError("subsystem order must list every subsystem once");
    }
    std::vector<bool> seen(layout.size(), false);
    for (auto k : order) {
        if (k >= layout.size() || seen[k]) {
            throw ValidationError("subsystem order must be a permutation");
        }
        seen[k] = true;
    }
}

struct Synthesizer {
    const HilbertLayout &layout;
    const std::vector<std::size_t> &order;
    double scale;

    /// `cond` acts on the subsystems `remaining` (original indices, layout order).
    TreeNode build(const CMatrix &cond, const std::vector<std::size_t> &remaining, std::size_t depth,
                   std::vector<std::size_t> &path) const {
        const std::size_t k = order[depth];
        const auto pos = static_cast<std::size_t>(std::find(remaining.begin(), remaining.end(), k) - remaining.begin());
        std::vector<std::size_t> rem_dims;
        for (auto r : remaining) {
            rem_dims.push_back(layout.dim(r));
        }
        HilbertLayout rem_layout(rem_dims);

        std::vector<std::size_t> discard;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            if (i != pos) {
                discard.push_back(i);
            }
        }
        CMatrix reduced = partial_trace(cond, rem_layout, discard);
        const auto dk = reduced.rows();
        Complex tr = reduced.trace();
        if (std::abs(tr) > 1e-9 * std::max(scale, 1e-300)) {
            throw ConvergenceError("synthesize_tree: conditioned matrix lost tracelessness at path '" + path_label(path) + "'",
                                   std::abs(tr));
        }
        reduced -= (tr / static_cast<double>(dk)) * CMatrix::Identity(dk, dk);
        // rounding noise left after a cancelling partial trace carries no constraint
        if (reduced.norm() <= kNegligible * scale) {
            reduced.setZero();
        }

        CMatrix basis;
        try {
            basis = zerodiag::zero_diag_basis(reduced);
        } catch (const ConvergenceError &e) {
            throw ConvergenceError(std::string("synthesize_tree: zero-diagonalization failed at path '") + path_label(path) +
                                       "': " + e.what(),
                                   e.residual());
        }

        TreeNode node;
        node.subsystem = k;
        for (Eigen::Index x = 0; x < dk; ++x) {
            node.basis.push_back(basis.col(x));
        }
        if (depth + 1 == order.size()) {
            return node;
        }
        std::vector<std::size_t> next_remaining = remaining;
        next_remaining.erase(next_remaining.begin() + static_cast<std::ptrdiff_t>(pos));
        for (Eigen::Index x = 0; x < dk; ++x) {
            CMatrix child_cond = sandwich(cond, rem_layout, pos, node.basis[static_cast<std::size_t>(x)]);
            path.push_back(static_cast<std::size_t>(x));
            node.children.push_back(build(child_cond, next_remaining, depth + 1, path));
            path.pop_back();
        }
        return node;
    }
};

void collect_leaves(const MeasurementTree &tree, const TreeNode &node, std::size_t depth, std::vector<std::size_t> &path,
                    std::vector<CVector> &locals, std::vector<Leaf> &out) {
    for (std::size_t x = 0; x < node.basis.size(); ++x) {
        locals[node.subsystem] = node.basis[x];
        path.push_back(x);
        if (depth + 1 == tree.order.size()) {
            CVector v = locals[0];
            for (std::size_t k = 1; k < locals.size(); ++k) {
                CMatrix prod = kron(CMatrix(v), CMatrix(locals[k]));
                v = prod.col(0);
            }
            out.push_back({path, std::move(v)});
        } else {
            collect_leaves(tree, node.children[x], depth + 1, path, locals, out);
        }
        path.pop_back();
    }
}

void validate_node(const MeasurementTree &tree, const TreeNode &node, std::size_t depth) {
    if (node.subsystem != tree.order[depth]) {
        throw ValidationError("tree node subsystem does not follow the order");
    }
    const std::size_t d = tree.layout.dim(node.subsystem);
    if (node.basis.size() != d) {
        throw ValidationError("tree node basis has the wrong number of vectors");
    }
    CMatrix b(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t x = 0; x < d; ++x) {
        if (static_cast<std::size_t>(node.basis[x].size()) != d) {
            throw ValidationError("tree node basis vector has the wrong dimension");
        }
        b.col(static_cast<Eigen::Index>(x)) = node.basis[x];
    }
    if (max_abs(b.adjoint() * b - CMatrix::Identity(b.cols(), b.cols())) > 1e-9) {
        throw ValidationError("tree node basis is not orthonormal");
    }
    const bool last = depth + 1 == tree.order.size();
    if (last ? !node.children.empty() : node.children.size() != d) {
        throw ValidationError("tree node has the wrong number of children");
    }
    for (const auto &c : node.children) {
        validate_node(tree, c, depth + 1);
    }
}

nlohmann::json node_to_json(const TreeNode &node) {
    nlohmann::json basis = nlohmann::json::array();
    for (const auto &v : node.basis) {
        basis.push_back(to_json(v));
    }
    nlohmann::json children = nlohmann::json::array();
    for (const auto &c : node.children) {
        children.push_back(node_to_json(c));
    }
    return {{"subsystem", node.subsystem}, {"basis", std::move(basis)}, {"children", std::move(children)}};
}

TreeNode node_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("subsystem") || !j.contains("basis")) {
        throw ValidationError("tree node needs 'subsystem' and 'basis'");
    }
    TreeNode node;
    node.subsystem = j.at("subsystem").get<std::size_t>();
    for (const auto &v : j.at("basis")) {
        node.basis.push_back(vector_from_json(v));
    }
    if (j.contains("children")) {
        for (const auto &c : j.at("children")) {
            node.children.push_back(node_from_json(c));
        }
    }
    return node;
}

void collect_bloch(const TreeNode &node, const HilbertLayout &layout, double theta, std::vector<std::size_t> &path,
                   std::vector<BlochRow> &out) {
    if (layout.dim(node.subsystem) != 2) {
        throw ValidationError("Bloch export needs qubit subsystems");
    }
    const CVector &e = node.basis.front();
    Complex coh = std::conj(e(0)) * e(1);
    out.push_back({theta, path_label(path), node.subsystem, 2.0 * coh.real(), 2.0 * coh.imag(),
                   std::norm(e(0)) - std::norm(e(1))});
    for (std::size_t x = 0; x < node.children.size(); ++x) {
        path.push_back(x);
        collect_bloch(node.children[x], layout, theta, path, out);
        path.pop_back();
    }
}

}  // namespace

std::string path_label(const std::vector<std::size_t> &path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) {
            out += '.';
        }
        out += std::to_string(path[i]);
    }
    return out;
}

std::vector<std::size_t> default_order(const HilbertLayout &layout) {
    std::vector<std::size_t> order(layout.size());
    std::iota(order.begin(), order.end(), 0);
    return order;
}

void MeasurementTree::validate() const {
    check_order(layout, order);
    validate_node(*this, root, 0);
}

MeasurementTree synthesize_tree(const CMatrix &m_tilde, const HilbertLayout &layout, const std::vector<std::size_t> &order) {
    check_order(layout, order);
    const auto d = static_cast<Eigen::Index>(layout.total());
    if (m_tilde.rows() != d || m_tilde.cols() != d) {
        throw ValidationError("synthesize_tree: matrix does not act on the layout");
    }
    const double scale = m_tilde.norm();
    if (std::abs(m_tilde.trace()) > 1e-9 * scale) {
        throw ValidationError("synthesize_tree: matrix must be traceless");
    }
    Synthesizer synth{layout, order, scale};
    std::vector<std::size_t> path;
    MeasurementTree tree{layout, order, synth.build(m_tilde, default_order(layout), 0, path)};
    return tree;
}

MeasurementTree product_tree(const HilbertLayout &layout, const std::vector<CMatrix> &local_bases,
                             const std::vector<std::size_t> &order) {
    check_order(layout, order);
    if (local_bases.size() != layout.size()) {
        throw ValidationError("product_tree needs one basis per subsystem");
    }
    std::function<TreeNode(std::size_t)> build = [&](std::size_t depth) {
        TreeNode node;
        node.subsystem = order[depth];
        const auto &b = local_bases[node.subsystem];
        for (Eigen::Index x = 0; x < b.cols(); ++x) {
            node.basis.push_back(b.col(x));
        }
        if (depth + 1 < order.size()) {
            for (Eigen::Index x = 0; x < b.cols(); ++x) {
                node.children.push_back(build(depth + 1));
            }
        }
        return node;
    };
    MeasurementTree tree{layout, order, build(0)};
    tree.validate();
    return tree;
}

std::vector<Leaf> leaves(const MeasurementTree &tree) {
    std::vector<Leaf> out;
    std::vector<std::size_t> path;
    std::vector<CVector> locals(tree.layout.size());
    collect_leaves(tree, tree.root, 0, path, locals, out);
    return out;
}

Povm flatten(const MeasurementTree &tree) {
    tree.validate();
    Povm povm;
    for (auto &leaf : leaves(tree)) {
        povm.elements.push_back(projector(leaf.vector));
        povm.labels.push_back(path_label(leaf.path));
    }
    return povm;
}

double leaf_residual(const MeasurementTree &tree, const CMatrix &m) {
    double worst = 0.0;
    for (const auto &leaf : leaves(tree)) {
        worst = std::max(worst, std::abs(leaf.vector.dot(m * leaf.vector)));
    }
    return worst;
}

MeasurementTree synthesize_for_family(const StateFamily &family, double theta,
                                      const std::optional<std::vector<std::size_t>> &order) {
    auto sat = build_saturation_matrices(family, theta);
    if (!sat.m_tilde) {
        throw ValidationError("family is neither pure nor rank-two with a fixed eigenbasis; no LOCC construction applies");
    }
    if (qfi(family, theta) <= 1e-14) {
        throw ValidationError("quantum Fisher information vanishes at this theta; nothing to estimate");
    }
    return synthesize_tree(*sat.m_tilde, family.layout(), order.value_or(default_order(family.layout())));
}

SaturationReport verify_tree(const MeasurementTree &tree, const StateFamily &family, double theta,
                             const SaturationThresholds &thresholds) {
    if (!(tree.layout == family.layout())) {
        throw ValidationError("tree and family layouts differ");
    }
    return check_saturating(flatten(tree), family, theta, thresholds);
}

DiscriminationReport discrimination_report(const MeasurementTree &tree, const CVector &psi0, const CVector &psi1) {
    DiscriminationReport rep;
    for (const auto &leaf : leaves(tree)) {
        Complex a0 = leaf.vector.dot(psi0);
        Complex a1 = leaf.vector.dot(psi1);
        double o0 = std::norm(a0);
        double o1 = std::norm(a1);
        rep.leaf_assignment[path_label(leaf.path)] = o0 >= o1 ? 0 : 1;
        rep.success_prob += 0.5 * std::max(o0, o1);
        rep.residual = std::max(rep.residual, std::abs(a0 * std::conj(a1)));
    }
    return rep;
}

Discrimination discriminate(const StateVector &psi0, const StateVector &psi1,
                            const std::optional<std::vector<std::size_t>> &order) {
    if (!(psi0.layout == psi1.layout)) {
        throw ValidationError("discriminate: states live on different layouts");
    }
    if (!psi0.is_normalized(1e-10) || !psi1.is_normalized(1e-10)) {
        throw ValidationError("discriminate: states must be normalized");
    }
    if (std::abs(psi0.amplitudes.dot(psi1.amplitudes)) > 1e-10) {
        throw ValidationError("discriminate: states must be orthogonal");
    }
    CMatrix m = psi0.amplitudes * psi1.amplitudes.adjoint();
    auto tree = synthesize_tree(m, psi0.layout, order.value_or(default_order(psi0.layout)));
    auto rep = discrimination_report(tree, psi0.amplitudes, psi1.amplitudes);
    return {std::move(tree), std::move(rep)};
}

nlohmann::json tree_to_json(const MeasurementTree &tree) {
    return {{"layout", tree.layout.dims()}, {"order", tree.order}, {"node", node_to_json(tree.root)}};
}

MeasurementTree tree_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("layout") || !j.contains("node")) {
        throw ValidationError("tree JSON needs 'layout' and 'node'");
    }
    MeasurementTree tree;
    try {
        tree.layout = HilbertLayout(j.at("layout").get<std::vector<std::size_t>>());
        tree.order = j.contains("order") ? j.at("order").get<std::vector<std::size_t>>() : default_order(tree.layout);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed tree JSON: ") + e.what());
    }
    tree.root = node_from_json(j.at("node"));
    tree.validate();
    return tree;
}

std::vector<BlochRow> bloch_rows(const MeasurementTree &tree, double theta) {
    std::vector<BlochRow> out;
    std::vector<std::size_t> path;
    collect_bloch(tree.root, tree.layout, theta, path, out);
    return out;
}

std::string bloch_csv(const std::vector<BlochRow> &rows) {
    std::ostringstream os;
    os << "theta,path,subsystem,x,y,z\n";
    char buf[160];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%zu,%.17g,%.17g,%.17g\n", r.theta, r.path.empty() ? "-" : r.path.c_str(),
                      r.subsystem, r.x, r.y, r.z);
        os << buf;
    }
    return os.str();
}

}  // namespace qcrb
