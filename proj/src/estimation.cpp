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

#include "qcrb/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace {

constexpr double kProbFloor = 1e-300;
constexpr double kNegativeProbTol = 1e-10;
constexpr int kBootstrapSamples = 2000;
constexpr std::uint64_t kBootstrapStream = 0xb0075742a9ULL;

std::vector<double> normalized_conditionals(const CMatrix &red, const std::vector<CVector> &basis) {
    double total = red.trace().real();
    std::vector<double> p(basis.size());
    if (total <= kProbFloor) {
        // unreachable branch, any distribution will do
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(basis.size()));
        return p;
    }
    for (std::size_t x = 0; x < basis.size(); ++x) {
        double v = basis[x].dot(red * basis[x]).real() / total;
        if (v < -kNegativeProbTol) {
            throw ValidationError("path sampler: negative outcome probability, state is not positive");
        }
        p[x] = std::max(v, 0.0);
    }
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (double &v : p) {
        v /= s;
    }
    return p;
}

}  // namespace

PathSampler::PathSampler(const MeasurementTree &tree, const CMatrix &rho) {
    tree.validate();
    if (rho.rows() != static_cast<Eigen::Index>(tree.layout.total()) || rho.cols() != rho.rows()) {
        throw ValidationError("path sampler: state does not match the tree layout");
    }
    for (std::size_t k : tree.order) {
        radices_.push_back(tree.layout.dim(k));
    }
    num_leaves_ = tree.layout.total();
    std::vector<std::size_t> remaining(tree.layout.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    build(tree, tree.root, rho, remaining);
}

int PathSampler::build(const MeasurementTree &tree, const TreeNode &node, const CMatrix &cond,
                       const std::vector<std::size_t> &remaining) {
    std::vector<std::size_t> dims;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        dims.push_back(tree.layout.dim(remaining[i]));
        if (remaining[i] == node.subsystem) {
            pos = i;
        }
    }
    HilbertLayout sub(dims);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (i != pos) {
            others.push_back(i);
        }
    }
    CMatrix red = others.empty() ? cond : partial_trace(cond, sub, others);
    auto p = normalized_conditionals(red, node.basis);

    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<double> cdf(p.size());
    std::partial_sum(p.begin(), p.end(), cdf.begin());
    cdf.back() = 1.0;
    nodes_[static_cast<std::size_t>(id)].cdf = std::move(cdf);

    if (node.children.empty()) {
        return id;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i : others) {
        rest.push_back(remaining[i]);
    }
    std::vector<int> kids;
    for (std::size_t x = 0; x < node.children.size(); ++x) {
        CMatrix next = sandwich(cond, sub, pos, node.basis[x]);
        kids.push_back(build(tree, node.children[x], next, rest));
    }
    nodes_[static_cast<std::size_t>(id)].children = std::move(kids);
    return id;
}

std::vector<std::size_t> PathSampler::sample(SplitMix64 &rng) const {
    std::vector<std::size_t> path;
    path.reserve(radices_.size());
    std::size_t at = 0;
    while (true) {
        const Node &n = nodes_[at];
        double u = rng.uniform();
        auto it = std::upper_bound(n.cdf.begin(), n.cdf.end(), u);
        std::size_t x = std::min(static_cast<std::size_t>(it - n.cdf.begin()), n.cdf.size() - 1);
        path.push_back(x);
        if (n.children.empty()) {
            return path;
        }
        at = static_cast<std::size_t>(n.children[x]);
    }
}

std::size_t PathSampler::sample_leaf(SplitMix64 &rng) const {
    std::size_t idx = 0;
    std::size_t at = 0;
    std::size_t level = 0;
    while (true) {
        const Node &n = nodes_[at];
        double u = rng.uniform();
        auto it = std::upper_bound(n.cdf.begin(), n.cdf.end(), u);
        std::size_t x = std::min(static_cast<std::size_t>(it - n.cdf.begin()), n.cdf.size() - 1);
        idx = idx * radices_[level] + x;
        ++level;
        if (n.children.empty()) {
            return idx;
        }
        at = static_cast<std::size_t>(n.children[x]);
    }
}

std::vector<double> PathSampler::leaf_probabilities() const {
    std::vector<double> out;
    out.reserve(num_leaves_);
    std::function<void(std::size_t, double)> walk = [&](std::size_t at, double acc) {
        const Node &n = nodes_[at];
        for (std::size_t x = 0; x < n.cdf.size(); ++x) {
            double px = n.cdf[x] - (x == 0 ? 0.0 : n.cdf[x - 1]);
            if (n.children.empty()) {
                out.push_back(acc * px);
            } else {
                walk(static_cast<std::size_t>(n.children[x]), acc * px);
            }
        }
    };
    walk(0, 1.0);
    return out;
}

std::vector<std::size_t> sample_path(const MeasurementTree &tree, const CMatrix &rho, SplitMix64 &rng) {
    return PathSampler(tree, rho).sample(rng);
}

namespace {

/// Log-likelihood of observed counts as a function of theta.
class LogLikelihood {
   public:
    LogLikelihood(const Counts &counts, const StateFamily &family, const MeasurementTree &tree) : family_(family) {
        auto lv = leaves(tree);
        if (counts.size() != lv.size()) {
            throw ValidationError("mle: counts do not match the number of tree leaves");
        }
        std::vector<Eigen::Index> used;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] > 0) {
                used.push_back(static_cast<Eigen::Index>(i));
                weights_.push_back(static_cast<double>(counts[i]));
            }
        }
        const auto dim = static_cast<Eigen::Index>(tree.layout.total());
        e_ = CMatrix(dim, static_cast<Eigen::Index>(used.size()));
        for (std::size_t c = 0; c < used.size(); ++c) {
            e_.col(static_cast<Eigen::Index>(c)) = lv[static_cast<std::size_t>(used[c])].vector;
        }
    }

    bool empty() const {
        return weights_.empty();
    }

    double operator()(double theta) const {
        RVector p;
        try {
            if (auto psi = pure_state(family_, theta)) {
                p = (e_.adjoint() * *psi).cwiseAbs2();
            } else {
                CMatrix rho = density(family_, theta);
                p = (e_.adjoint() * rho * e_).diagonal().real();
            }
        } catch (const ValidationError &) {
            return -std::numeric_limits<double>::infinity();
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            acc += weights_[i] * std::log(std::max(p(static_cast<Eigen::Index>(i)), kProbFloor));
        }
        return acc;
    }

   private:
    const StateFamily &family_;
    CMatrix e_;
    std::vector<double> weights_;
};

void check_prior(const PriorInterval &prior) {
    if (!(std::isfinite(prior.lo) && std::isfinite(prior.hi) && prior.lo < prior.hi)) {
        throw ValidationError("prior interval must be finite with lo < hi");
    }
}

}  // namespace

MleResult mle(const Counts &counts, const StateFamily &family, const MeasurementTree &tree, const PriorInterval &prior) {
    check_prior(prior);
    LogLikelihood ll(counts, family, tree);
    const double mid = 0.5 * (prior.lo + prior.hi);
    if (ll.empty()) {
        return {mid, 0.0, true, false};
    }

    const int n = kMleGridPoints;
    const double step = (prior.hi - prior.lo) / (n - 1);
    std::vector<double> grid(n), val(n);
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = i == n - 1 ? prior.hi : prior.lo + step * i;
        val[static_cast<std::size_t>(i)] = ll(grid[static_cast<std::size_t>(i)]);
    }
    double vmax = *std::max_element(val.begin(), val.end());
    double vmin = *std::min_element(val.begin(), val.end());
    if (!std::isfinite(vmax)) {
        throw ValidationError("mle: likelihood vanishes on the whole prior interval");
    }
    const double tie = 1e-12 * std::max(1.0, std::abs(vmax));
    if (std::isfinite(vmin) && vmax - vmin <= 1e-9 * std::max(1.0, std::abs(vmax))) {
        return {mid, ll(mid), true, false};
    }

    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (val[i] >= vmax - tie) {
            double d = std::abs(grid[i] - mid);
            if (d < best_dist) {
                best_dist = d;
                best = i;
            }
        }
    }

    // golden section inside the neighbouring grid cells
    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = ll(c), fd = ll(d);
    while (b - a > 1e-10) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ll(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ll(d);
        }
    }
    double theta = 0.5 * (a + b);
    double ft = ll(theta);
    if (val[best] > ft) {
        theta = grid[best];
        ft = val[best];
    }
    const double edge = 1e-9 * (prior.hi - prior.lo);
    bool boundary = theta - prior.lo <= edge || prior.hi - theta <= edge;
    return {theta, ft, false, boundary};
}

MleResult mle(const std::map<std::string, std::uint64_t> &counts, const StateFamily &family, const MeasurementTree &tree,
              const PriorInterval &prior) {
    auto lv = leaves(tree);
    Counts flat(lv.size(), 0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < lv.size(); ++i) {
        index[path_label(lv[i].path)] = i;
    }
    for (const auto &[label, c] : counts) {
        auto it = index.find(label);
        if (it == index.end()) {
            throw ValidationError("mle: unknown outcome path '" + label + "'");
        }
        flat[it->second] += c;
    }
    return mle(flat, family, tree, prior);
}

TwoStepSplit two_step_split(std::uint64_t shots) {
    if (shots < 16) {
        throw ValidationError("two-step strategy needs at least 16 shots");
    }
    auto rough = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(shots))));
    while (rough * rough < shots) {
        ++rough;
    }
    while (rough > 1 && (rough - 1) * (rough - 1) >= shots) {
        --rough;
    }
    return {rough, shots - rough};
}

namespace {

Counts draw(const PathSampler &sampler, std::uint64_t shots, SplitMix64 &rng) {
    Counts counts(sampler.num_leaves(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        ++counts[sampler.sample_leaf(rng)];
    }
    return counts;
}

void check_config(const SimConfig &config) {
    check_prior(config.prior);
    if (!(config.theta_true >= config.prior.lo && config.theta_true <= config.prior.hi)) {
        throw ValidationError("theta_true lies outside the prior interval");
    }
    if (config.shots == 0) {
        throw ValidationError("shots must be positive");
    }
    if (config.trials < 2) {
        throw ValidationError("at least two trials are needed for a variance");
    }
}

}  // namespace

TwoStepResult two_step(const SimConfig &config, SplitMix64 &rng) {
    check_config(config);
    auto split = two_step_split(config.shots);
    const double mid = 0.5 * (config.prior.lo + config.prior.hi);
    CMatrix rho = density(config.family, config.theta_true);

    MeasurementTree rough_tree = synthesize_for_family(config.family, mid);
    Counts c1 = draw(PathSampler(rough_tree, rho), split.rough, rng);
    MleResult rough = mle(c1, config.family, rough_tree, config.prior);

    MeasurementTree tree = rough_tree;
    try {
        tree = synthesize_for_family(config.family, rough.theta);
    } catch (const ValidationError &) {
        // no information at the rough estimate, keep the reference tree
    }
    Counts c2 = draw(PathSampler(tree, rho), split.refined, rng);
    MleResult fine = mle(c2, config.family, tree, config.prior);
    return {fine.theta, rough.theta, fine.at_boundary, fine.degenerate};
}

SimReport run_trials(const SimConfig &config) {
    check_config(config);
    SimReport rep;
    rep.theta_true = config.theta_true;
    rep.shots = config.shots;
    rep.trials = config.trials;
    rep.seed = config.seed;
    rep.strategy = config.strategy == Strategy::FixedTree ? "fixed" : "two-step";
    rep.qfi = qfi(config.family, config.theta_true);

    std::optional<MeasurementTree> tree;
    std::optional<PathSampler> sampler;
    if (config.strategy == Strategy::FixedTree) {
        tree = config.tree ? *config.tree : synthesize_for_family(config.family, config.theta_true);
        if (!(tree->layout == config.family.layout())) {
            throw ValidationError("measurement tree layout does not match the family");
        }
        sampler.emplace(*tree, density(config.family, config.theta_true));
        auto ev = eval_state(config.family, config.theta_true);
        rep.fi = fisher_info(flatten(*tree), ev.rho, ev.drho);
    } else {
        two_step_split(config.shots);
    }

    const std::size_t n = config.trials;
    std::vector<double> est(n);
    std::vector<char> degenerate(n, 0), boundary(n, 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed) {
            std::size_t t = next++;
            if (t >= n) {
                return;
            }
            try {
                SplitMix64 rng(SplitMix64::derive(config.seed, t));
                if (config.strategy == Strategy::FixedTree) {
                    auto r = mle(draw(*sampler, config.shots, rng), config.family, *tree, config.prior);
                    est[t] = r.theta;
                    degenerate[t] = r.degenerate;
                    boundary[t] = r.at_boundary;
                } else {
                    auto r = two_step(config, rng);
                    est[t] = r.theta;
                    degenerate[t] = r.degenerate;
                    boundary[t] = r.at_boundary;
                }
            } catch (...) {
                if (!failed.exchange(true)) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t nthreads = std::min<std::size_t>(hw, n);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < nthreads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    rep.estimates = est;
    std::vector<double> good;
    for (std::size_t t = 0; t < n; ++t) {
        rep.degenerate_trials += degenerate[t] ? 1 : 0;
        rep.boundary_trials += boundary[t] ? 1 : 0;
        if (!degenerate[t]) {
            good.push_back(est[t]);
        }
    }
    auto moments = [](const std::vector<double> &v, double &mean, double &var) {
        mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) {
            ss += (x - mean) * (x - mean);
        }
        var = ss / static_cast<double>(v.size() - 1);
    };
    const double scale = static_cast<double>(config.shots) * rep.qfi;
    if (good.size() < 2) {
        // likelihood carried no information: the bound is not approached at all
        rep.informative = false;
        rep.mean = 0.5 * (config.prior.lo + config.prior.hi);
        rep.variance = std::numeric_limits<double>::infinity();
        rep.ratio = rep.ci95_lo = rep.ci95_hi = std::numeric_limits<double>::infinity();
        return rep;
    }
    moments(good, rep.mean, rep.variance);
    rep.ratio = scale * rep.variance;

    SplitMix64 brng(SplitMix64::derive(config.seed, kBootstrapStream));
    std::vector<double> boot(kBootstrapSamples), sample(good.size());
    for (auto &b : boot) {
        for (auto &x : sample) {
            x = good[static_cast<std::size_t>(brng.uniform() * static_cast<double>(good.size()))];
        }
        double m = 0.0, v = 0.0;
        moments(sample, m, v);
        b = scale * v;
    }
    std::sort(boot.begin(), boot.end());
    rep.ci95_lo = boot[static_cast<std::size_t>(0.025 * (kBootstrapSamples - 1))];
    rep.ci95_hi = boot[static_cast<std::size_t>(0.975 * (kBootstrapSamples - 1))];
    return rep;
}

nlohmann::json to_json(const SimReport &r) {
    auto num = [](double x) -> nlohmann::json {
        return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
    };
    nlohmann::json j;
    j["theta_true"] = r.theta_true;
    j["N"] = r.shots;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["strategy"] = r.strategy;
    j["J"] = r.qfi;
    j["fi"] = r.fi ? num(*r.fi) : nlohmann::json(nullptr);
    j["mean"] = num(r.mean);
    j["variance"] = num(r.variance);
    j["ratio"] = num(r.ratio);
    j["ci95"] = {num(r.ci95_lo), num(r.ci95_hi)};
    j["degenerate_trials"] = r.degenerate_trials;
    j["boundary_trials"] = r.boundary_trials;
    j["informative"] = r.informative;
    return j;
}

}  // namespace qcrb
