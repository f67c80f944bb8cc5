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

#include <optional>
#include <string>
#include <vector>

#include "qcrb/estimation.hpp"
#include "qcrb/metrology.hpp"
#include "qcrb/tensor.hpp"

namespace qcrb {

struct PauliTerm {
    double coeff = 0.0;
    std::string string;  // over I, X, Y, Z; character k acts on qubit k
};

/// Sum of coeff * (tensor product of Paulis). Throws on bad letters or length.
CMatrix pauli_hamiltonian(const std::vector<PauliTerm> &terms, std::size_t num_qubits);

/// Inclusive uniform grid; count 1 gives {lo}.
std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

inline constexpr std::size_t kDefaultGridCount = 32;

struct Scenario {
    std::string name;
    std::string notes;
    StateFamily family;
    std::vector<double> theta_grid;
    PriorInterval prior;
    nlohmann::json source;  // canonical description, what to_json emits
};

/// Builds a scenario from its JSON description. Throws ValidationError on a
/// malformed description or if the family cannot be evaluated on the grid.
Scenario scenario_from_json(const nlohmann::json &j);
nlohmann::json scenario_to_json(const Scenario &s);

std::vector<std::string> builtin_scenario_names();
std::optional<nlohmann::json> builtin_scenario_json(const std::string &name);

/// Builtin by name, otherwise a path to a scenario file.
Scenario load_scenario(const std::string &name_or_path);

Scenario scenario_ghz(int n);
Scenario scenario_chain4();
Scenario scenario_bell_mixture();
Scenario scenario_ranktwo(const CVector &psi0, const CVector &psi1, double offset, double slope,
                          const HilbertLayout &layout);

}  // namespace qcrb
