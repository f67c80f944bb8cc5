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

#include "qcrb/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcrb/errors.hpp"
#include "qcrb/estimation.hpp"
#include "qcrb/lm.hpp"
#include "qcrb/locc.hpp"
#include "qcrb/scenarios.hpp"

namespace qcrb {

namespace {

using nlohmann::json;

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open '" + path + "'");
    }
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception &e) {
        throw ValidationError("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text(const std::string &path, const std::string &text, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw ValidationError("cannot write '" + path + "'");
    }
    f << text;
}

std::string dump(const json &j) {
    return j.dump(2) + "\n";
}

std::optional<std::vector<std::size_t>> order_arg(const std::vector<std::size_t> &order) {
    if (order.empty()) {
        return std::nullopt;
    }
    return order;
}

MeasurementTree read_tree(const std::string &path) {
    try {
        return tree_from_json(read_json_file(path));
    } catch (const json::exception &e) {
        throw ValidationError("malformed tree file '" + path + "': " + e.what());
    }
}

double pick_theta(const Scenario &s, const std::optional<double> &theta) {
    return theta ? *theta : s.theta_grid.front();
}

json lm_result_json(const std::string &method, const lm::IsometryPair &pair, const lm::LmFeasibilityReport &rep,
                    int restarts, double objective) {
    return {{"method", method},
            {"residuals", {{"phase", rep.phase_residual}, {"support", rep.support_residual}}},
            {"feasible", rep.feasible},
            {"projective", rep.projective},
            {"evidence_only", !rep.feasible},
            {"restarts_run", restarts},
            {"objective", objective},
            {"U", to_json(pair.u_mat)},
            {"V", to_json(pair.v_mat)}};
}

}  // namespace

int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Saturating local measurements for quantum parameter estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qcrb 0.1.0");

    std::string scenario_name;
    std::optional<double> theta;
    std::vector<std::size_t> order;
    std::string out_path, tree_path;

    auto *c_qfi = app.add_subcommand("qfi", "quantum Fisher information of a scenario");
    c_qfi->add_option("scenario", scenario_name, "builtin name or scenario file")->required();
    c_qfi->add_option("--theta", theta, "single parameter value (default: whole grid)");

    auto *c_syn = app.add_subcommand("synthesize", "build a saturating LOCC measurement tree");
    c_syn->add_option("scenario", scenario_name)->required();
    c_syn->add_option("--theta", theta, "parameter value (default: first grid point)");
    c_syn->add_option("--order", order, "subsystem measurement order, 0-based")->delimiter(',');
    c_syn->add_option("--out", out_path, "tree JSON file (default: stdout)");

    auto *c_ver = app.add_subcommand("verify", "check that a tree saturates the bound");
    c_ver->add_option("scenario", scenario_name)->required();
    c_ver->add_option("--tree", tree_path)->required();
    c_ver->add_option("--theta", theta);

    std::uint64_t shots = 10000, trials = 100, seed = 1;
    bool two_step_flag = false;
    std::vector<double> prior_arg;
    auto *c_sim = app.add_subcommand("simulate", "Monte-Carlo estimation with the synthesized measurement");
    c_sim->add_option("scenario", scenario_name)->required();
    c_sim->add_option("--theta", theta);
    c_sim->add_option("--shots", shots)->check(CLI::PositiveNumber);
    c_sim->add_option("--trials", trials)->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 40));
    c_sim->add_option("--seed", seed);
    c_sim->add_flag("--two-step", two_step_flag, "rough sqrt(N) stage then re-synthesized tree");
    c_sim->add_option("--prior", prior_arg, "lo,hi")->delimiter(',')->expected(2);
    c_sim->add_option("--tree", tree_path, "fixed tree JSON instead of synthesizing");

    std::string a_path, b_path;
    bool projective_only = false;
    int restarts = 100;
    std::size_t pad_cols = 1;
    auto *c_lm = app.add_subcommand("lm-check", "saturating local measurement without communication");
    c_lm->add_option("scenario", scenario_name);
    c_lm->add_option("--a-mat", a_path, "JSON matrix of psi coefficients");
    c_lm->add_option("--b-mat", b_path, "JSON matrix of psi_perp coefficients");
    c_lm->add_option("--theta", theta);
    c_lm->add_flag("--projective-only", projective_only);
    c_lm->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
    c_lm->add_option("--seed", seed);
    c_lm->add_option("--pad-cols", pad_cols, "extra columns of the second isometry");

    std::vector<double> grid_arg;
    auto *c_bloch = app.add_subcommand("export-bloch", "Bloch coordinates of the tree bases over a grid");
    c_bloch->add_option("scenario", scenario_name)->required();
    c_bloch->add_option("--tree", tree_path, "fixed tree (default: synthesize at each grid point)");
    c_bloch->add_option("--grid", grid_arg, "lo,hi,count")->delimiter(',')->expected(3);
    c_bloch->add_option("--order", order)->delimiter(',');
    c_bloch->add_option("--out", out_path, "CSV file (default: stdout)");

    auto *c_scn = app.add_subcommand("scenario", "builtin scenarios");
    c_scn->require_subcommand(1);
    auto *c_list = c_scn->add_subcommand("list", "list builtin scenarios");
    auto *c_show = c_scn->add_subcommand("show", "print a scenario as JSON");
    c_show->add_option("name", scenario_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_qfi->parsed()) {
            Scenario s = load_scenario(scenario_name);
            auto one = [&](double t) {
                auto ev = eval_state(s.family, t);
                auto r = sld(ev.rho, ev.drho);
                return json{{"theta", t}, {"qfi", r.qfi}, {"rank", r.rank()}};
            };
            json j{{"scenario", s.name}};
            if (theta) {
                j.update(one(*theta));
            } else {
                json rows = json::array();
                for (double t : s.theta_grid) {
                    rows.push_back(one(t));
                }
                j["grid"] = rows;
            }
            out << dump(j);
        } else if (c_syn->parsed()) {
            Scenario s = load_scenario(scenario_name);
            double t = pick_theta(s, theta);
            auto tree = synthesize_for_family(s.family, t, order_arg(order));
            write_text(out_path, dump(tree_to_json(tree)), out);
            if (!out_path.empty()) {
                out << dump({{"scenario", s.name}, {"theta", t}, {"out", out_path}, {"leaves", leaves(tree).size()}});
            }
        } else if (c_ver->parsed()) {
            Scenario s = load_scenario(scenario_name);
            double t = pick_theta(s, theta);
            auto tree = read_tree(tree_path);
            json j = to_json(verify_tree(tree, s.family, t));
            j["scenario"] = s.name;
            j["theta"] = t;
            out << dump(j);
        } else if (c_sim->parsed()) {
            Scenario s = load_scenario(scenario_name);
            PriorInterval prior = s.prior;
            if (!prior_arg.empty()) {
                prior = {prior_arg[0], prior_arg[1]};
            }
            double t = theta ? *theta : 0.5 * (prior.lo + prior.hi);
            SimConfig cfg{s.family, t, two_step_flag ? Strategy::TwoStep : Strategy::FixedTree, shots, trials, seed,
                          prior, std::nullopt};
            if (!tree_path.empty()) {
                cfg.tree = read_tree(tree_path);
            }
            json j = to_json(run_trials(cfg));
            j["scenario"] = s.name;
            out << dump(j);
        } else if (c_lm->parsed()) {
            lm::BipartiteCoeffs coeffs;
            std::string label;
            if (!a_path.empty() || !b_path.empty()) {
                if (a_path.empty() || b_path.empty() || !scenario_name.empty()) {
                    throw ValidationError("lm-check takes either a scenario or both --a-mat and --b-mat");
                }
                coeffs = {matrix_from_json(read_json_file(a_path)), matrix_from_json(read_json_file(b_path))};
                label = "matrices";
            } else {
                if (scenario_name.empty()) {
                    throw ValidationError("lm-check needs a scenario or --a-mat/--b-mat");
                }
                Scenario s = load_scenario(scenario_name);
                coeffs = lm::coefficients_for_family(s.family, pick_theta(s, theta));
                label = s.name;
            }
            json j;
            bool done = false;
            if (coeffs.a_mat.rows() == 2) {
                auto pair = lm::construct_lm_2xd(coeffs);
                auto rep = lm::check_lm_conditions(coeffs, pair);
                if (rep.feasible) {
                    j = lm_result_json("construct-2xd", pair, rep, 0, 0.0);
                    done = true;
                }
            }
            if (!done) {
                lm::SearchOptions opt;
                opt.restarts = restarts;
                opt.seed = seed;
                opt.allow_isometry_padding = !projective_only;
                opt.pad_cols = projective_only ? 0 : pad_cols;
                opt.pad_rows = 0;
                auto res = lm::heuristic_lm_search(coeffs, opt);
                j = lm_result_json(projective_only ? "search-projective" : "search-isometry", res.best, res.report,
                                   res.restarts_run, res.objective);
            }
            j["input"] = label;
            j["projective_only"] = projective_only;
            out << dump(j);
        } else if (c_bloch->parsed()) {
            Scenario s = load_scenario(scenario_name);
            std::vector<double> grid = s.theta_grid;
            if (!grid_arg.empty()) {
                if (!(grid_arg[2] >= 1.0) || grid_arg[2] != std::floor(grid_arg[2])) {
                    throw ValidationError("--grid count must be a positive integer");
                }
                grid = uniform_grid(grid_arg[0], grid_arg[1], static_cast<std::size_t>(grid_arg[2]));
            }
            std::optional<MeasurementTree> fixed;
            if (!tree_path.empty()) {
                fixed = read_tree(tree_path);
            }
            std::vector<BlochRow> rows;
            for (double t : grid) {
                auto tree = fixed ? *fixed : synthesize_for_family(s.family, t, order_arg(order));
                auto r = bloch_rows(tree, t);
                rows.insert(rows.end(), r.begin(), r.end());
            }
            write_text(out_path, bloch_csv(rows), out);
        } else if (c_list->parsed()) {
            json rows = json::array();
            for (const auto &name : builtin_scenario_names()) {
                json sj = *builtin_scenario_json(name);
                rows.push_back({{"name", name}, {"type", sj["type"]}, {"layout", sj["layout"]}, {"notes", sj["notes"]}});
            }
            out << dump(rows);
        } else if (c_show->parsed()) {
            out << dump(scenario_to_json(load_scenario(scenario_name)));
        }
    } catch (const ConvergenceError &e) {
        err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
        return 2;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace qcrb
