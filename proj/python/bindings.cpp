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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qcrb/cli.hpp"
#include "qcrb/errors.hpp"
#include "qcrb/estimation.hpp"
#include "qcrb/lm.hpp"
#include "qcrb/locc.hpp"
#include "qcrb/metrology.hpp"
#include "qcrb/scenarios.hpp"
#include "qcrb/zerodiag.hpp"

namespace py = pybind11;
using namespace qcrb;

namespace {

std::string dump(const nlohmann::json &j) {
    return j.dump();
}

std::pair<int, std::pair<std::string, std::string>> run_cli(const std::vector<std::string> &args) {
    std::vector<const char *> argv{"qcrb"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, {out.str(), err.str()}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Saturating local measurements for quantum parameter estimation";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    m.def("scenario_names", &builtin_scenario_names);
    m.def(
        "scenario_json", [](const std::string &name) { return dump(scenario_to_json(load_scenario(name))); },
        py::arg("name_or_path"));

    m.def(
        "qfi", [](const std::string &scenario, double theta) { return qfi(load_scenario(scenario).family, theta); },
        py::arg("scenario"), py::arg("theta"));
    m.def(
        "sld",
        [](const CMatrix &rho, const CMatrix &drho) {
            auto r = sld(rho, drho);
            return py::make_tuple(r.L, r.qfi);
        },
        py::arg("rho"), py::arg("drho"));
    m.def(
        "fisher_info",
        [](const std::vector<CMatrix> &elements, const CMatrix &rho, const CMatrix &drho) {
            Povm p;
            p.elements = elements;
            for (std::size_t i = 0; i < elements.size(); ++i) {
                p.labels.push_back(std::to_string(i));
            }
            return fisher_info(p, rho, drho);
        },
        py::arg("elements"), py::arg("rho"), py::arg("drho"));
    m.def("zero_diag_basis", &zerodiag::zero_diag_basis, py::arg("m"));

    m.def(
        "synthesize",
        [](const std::string &scenario, double theta, std::optional<std::vector<std::size_t>> order) {
            return dump(tree_to_json(synthesize_for_family(load_scenario(scenario).family, theta, order)));
        },
        py::arg("scenario"), py::arg("theta"), py::arg("order") = py::none());
    m.def(
        "verify",
        [](const std::string &scenario, const std::string &tree_json, double theta) {
            auto tree = tree_from_json(nlohmann::json::parse(tree_json));
            return dump(to_json(verify_tree(tree, load_scenario(scenario).family, theta)));
        },
        py::arg("scenario"), py::arg("tree_json"), py::arg("theta"));
    m.def(
        "simulate",
        [](const std::string &scenario, double theta, std::uint64_t shots, std::uint64_t trials, std::uint64_t seed,
           bool two_step) {
            Scenario s = load_scenario(scenario);
            SimConfig cfg{s.family, theta, two_step ? Strategy::TwoStep : Strategy::FixedTree,
                          shots, trials, seed, s.prior, std::nullopt};
            py::gil_scoped_release release;
            return dump(to_json(run_trials(cfg)));
        },
        py::arg("scenario"), py::arg("theta"), py::arg("shots") = 10000, py::arg("trials") = 100, py::arg("seed") = 1,
        py::arg("two_step") = false);
    m.def(
        "check_lm",
        [](const CMatrix &a, const CMatrix &b, const CMatrix &u, const CMatrix &v) {
            return dump(lm::to_json(lm::check_lm_conditions({a, b}, {u, v})));
        },
        py::arg("a"), py::arg("b"), py::arg("u"), py::arg("v"));
    m.def("cli", &run_cli, py::arg("args"), "Run the command-line interface; returns (code, (stdout, stderr)).");
}
