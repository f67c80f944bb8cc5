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

#include "qcrb/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qcrb/errors.hpp"

namespace qcrb {

using nlohmann::json;

CMatrix pauli_hamiltonian(const std::vector<PauliTerm> &terms, std::size_t num_qubits) {
    if (num_qubits == 0) {
        throw ValidationError("pauli hamiltonian needs at least one qubit");
    }
    CMatrix id = CMatrix::Identity(2, 2);
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto &t : terms) {
        if (t.string.size() != num_qubits) {
            throw ValidationError("pauli string '" + t.string + "' does not match the qubit count");
        }
        if (!std::isfinite(t.coeff)) {
            throw ValidationError("pauli coefficient must be finite");
        }
        std::vector<CMatrix> f;
        for (char c : t.string) {
            switch (c) {
                case 'I': f.push_back(id); break;
                case 'X': f.push_back(x); break;
                case 'Y': f.push_back(y); break;
                case 'Z': f.push_back(z); break;
                default: throw ValidationError(std::string("unknown pauli letter '") + c + "'");
            }
        }
        h += t.coeff * kron(f);
    }
    return h;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
    if (count == 0 || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw ValidationError("theta grid needs count >= 1 and finite lo <= hi");
    }
    if (count == 1) {
        return {lo};
    }
    if (hi == lo) {
        throw ValidationError("theta grid with several points needs lo < hi");
    }
    std::vector<double> g(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + step * static_cast<double>(i);
    }
    g.back() = hi;
    return g;
}

namespace {

const json &field(const json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string("scenario: missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const json &j, const char *what) {
    if (!j.is_number()) {
        throw ValidationError(std::string("scenario: ") + what + " must be a number");
    }
    return j.get<double>();
}

json bound_to_json(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

ThetaDomain parse_domain(const json &j) {
    ThetaDomain d;
    if (j.is_null()) {
        return d;
    }
    if (j.contains("lo") && !j.at("lo").is_null()) {
        d.lo = number(j.at("lo"), "domain.lo");
    }
    if (j.contains("hi") && !j.at("hi").is_null()) {
        d.hi = number(j.at("hi"), "domain.hi");
    }
    d.open = j.value("open", false);
    if (!(d.lo < d.hi)) {
        throw ValidationError("scenario: domain needs lo < hi");
    }
    return d;
}

json domain_to_json(const ThetaDomain &d) {
    return {{"lo", bound_to_json(d.lo)}, {"hi", bound_to_json(d.hi)}, {"open", d.open}};
}

struct Linear {
    double offset = 0.0;
    double slope = 0.0;
};

Linear parse_linear(const json &j) {
    return {number(field(j, "offset"), "offset"), number(field(j, "slope"), "slope")};
}

std::vector<std::size_t> parse_layout(const json &j) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError("scenario: layout must be a non-empty array of dimensions");
    }
    std::vector<std::size_t> dims;
    for (const auto &d : j) {
        if (!d.is_number_integer() || d.get<long long>() < 2) {
            throw ValidationError("scenario: layout dimensions must be integers >= 2");
        }
        dims.push_back(d.get<std::size_t>());
    }
    return dims;
}

bool all_qubits(const HilbertLayout &layout) {
    for (std::size_t k = 0; k < layout.size(); ++k) {
        if (layout.dim(k) != 2) {
            return false;
        }
    }
    return true;
}

}  // namespace

Scenario scenario_from_json(const json &j) {
    if (!j.is_object()) {
        throw ValidationError("scenario must be a JSON object");
    }
    const auto name = field(j, "name").get<std::string>();
    const auto type = field(j, "type").get<std::string>();
    HilbertLayout layout(parse_layout(field(j, "layout")));
    ThetaDomain domain = parse_domain(j.value("domain", json(nullptr)));

    json canon;
    canon["name"] = name;
    canon["type"] = type;
    canon["layout"] = layout.dims();
    canon["notes"] = j.value("notes", std::string());
    canon["domain"] = domain_to_json(domain);

    std::optional<StateFamily> family;
    if (type == "unitary-generator") {
        CVector psi = vector_from_json(field(j, "psi_in"));
        const json &hj = field(j, "hamiltonian");
        CMatrix g;
        if (hj.is_array() && !hj.empty() && hj[0].is_object()) {
            if (!all_qubits(layout)) {
                throw ValidationError("scenario: pauli hamiltonians need an all-qubit layout");
            }
            std::vector<PauliTerm> terms;
            json out = json::array();
            for (const auto &t : hj) {
                PauliTerm term{number(field(t, "coeff"), "coeff"), field(t, "string").get<std::string>()};
                out.push_back({{"coeff", term.coeff}, {"string", term.string}});
                terms.push_back(std::move(term));
            }
            g = pauli_hamiltonian(terms, layout.size());
            canon["hamiltonian"] = out;
        } else {
            g = matrix_from_json(hj);
            canon["hamiltonian"] = to_json(g);
        }
        canon["psi_in"] = to_json(psi);
        family = StateFamily::unitary_generator(layout, psi, g, domain);
    } else if (type == "rank-two") {
        CVector psi0 = vector_from_json(field(j, "psi0"));
        CVector psi1 = vector_from_json(field(j, "psi1"));
        const json &pj = field(j, "p");
        const auto form = pj.value("form", std::string("linear"));
        std::function<double(double)> p, dp;
        if (form == "linear") {
            Linear w = parse_linear(pj);
            p = [w](double t) { return w.offset + w.slope * t; };
            dp = [w](double) { return w.slope; };
            canon["p"] = {{"form", "linear"}, {"offset", w.offset}, {"slope", w.slope}};
        } else if (form == "cos2") {
            double freq = number(field(pj, "freq"), "freq");
            double phase = number(field(pj, "phase"), "phase");
            p = [=](double t) { return std::cos(freq * t + phase) * std::cos(freq * t + phase); };
            dp = [=](double t) { return -freq * std::sin(2.0 * (freq * t + phase)); };
            canon["p"] = {{"form", "cos2"}, {"freq", freq}, {"phase", phase}};
        } else {
            throw ValidationError("scenario: unknown p form '" + form + "'");
        }
        canon["psi0"] = to_json(psi0);
        canon["psi1"] = to_json(psi1);
        family = StateFamily::rank_two(layout, psi0, psi1, p, dp, domain);
    } else if (type == "mixed") {
        const json &cj = field(j, "components");
        if (!cj.is_array() || cj.empty()) {
            throw ValidationError("scenario: components must be a non-empty array");
        }
        std::vector<CMatrix> rhos;
        std::vector<Linear> weights;
        json out = json::array();
        for (const auto &c : cj) {
            CMatrix r = matrix_from_json(field(c, "rho"));
            if (r.rows() != static_cast<Eigen::Index>(layout.total()) || r.cols() != r.rows()) {
                throw ValidationError("scenario: component matrix does not match the layout");
            }
            if (!is_hermitian(r)) {
                throw ValidationError("scenario: component matrix is not Hermitian");
            }
            Linear w = parse_linear(field(c, "weight"));
            out.push_back({{"rho", to_json(r)}, {"weight", {{"offset", w.offset}, {"slope", w.slope}}}});
            rhos.push_back(hermitian_part(r));
            weights.push_back(w);
        }
        canon["components"] = out;
        auto eval = [rhos, weights](double t) {
            CMatrix acc = CMatrix::Zero(rhos[0].rows(), rhos[0].cols());
            for (std::size_t i = 0; i < rhos.size(); ++i) {
                acc += (weights[i].offset + weights[i].slope * t) * rhos[i];
            }
            return acc;
        };
        auto deriv = [rhos, weights](double) {
            CMatrix acc = CMatrix::Zero(rhos[0].rows(), rhos[0].cols());
            for (std::size_t i = 0; i < rhos.size(); ++i) {
                acc += weights[i].slope * rhos[i];
            }
            return acc;
        };
        family = StateFamily::mixed(layout, eval, 1e-5, domain, deriv);
    } else {
        throw ValidationError("scenario: unknown type '" + type + "'");
    }

    std::vector<double> grid;
    json gj = j.value("theta_grid", json(nullptr));
    if (gj.is_array()) {
        for (const auto &t : gj) {
            grid.push_back(number(t, "theta_grid entry"));
        }
        if (grid.empty()) {
            throw ValidationError("scenario: theta_grid is empty");
        }
        canon["theta_grid"] = grid;
    } else if (gj.is_object()) {
        double lo = number(field(gj, "lo"), "theta_grid.lo");
        double hi = number(field(gj, "hi"), "theta_grid.hi");
        auto count = gj.value("count", kDefaultGridCount);
        grid = uniform_grid(lo, hi, count);
        canon["theta_grid"] = {{"lo", lo}, {"hi", hi}, {"count", count}};
    } else {
        throw ValidationError("scenario: theta_grid must be a list or {lo, hi, count}");
    }

    PriorInterval prior;
    if (j.contains("prior") && !j.at("prior").is_null()) {
        const json &pj = j.at("prior");
        if (!pj.is_array() || pj.size() != 2) {
            throw ValidationError("scenario: prior must be [lo, hi]");
        }
        prior = {number(pj[0], "prior.lo"), number(pj[1], "prior.hi")};
    } else {
        auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
        prior = *lo < *hi ? PriorInterval{*lo, *hi} : PriorInterval{*lo - 0.5, *hi + 0.5};
    }
    if (!(prior.lo < prior.hi)) {
        throw ValidationError("scenario: prior needs lo < hi");
    }
    canon["prior"] = {prior.lo, prior.hi};

    for (double t : grid) {
        try {
            density(*family, t);
        } catch (const ValidationError &e) {
            std::ostringstream os;
            os << "scenario '" << name << "': invalid at theta = " << t << ": " << e.what();
            throw ValidationError(os.str());
        }
    }
    return Scenario{name, canon["notes"].get<std::string>(), std::move(*family), std::move(grid), prior, canon};
}

json scenario_to_json(const Scenario &s) {
    return s.source;
}

namespace {

constexpr double kPi = std::numbers::pi;

json real_vector(const std::vector<double> &v) {
    json out = json::array();
    for (double x : v) {
        out.push_back(x);
    }
    return out;
}

json ghz_json(int n) {
    std::vector<double> psi(std::size_t{1} << n, 0.0);
    psi.front() = psi.back() = 1.0 / std::sqrt(2.0);
    json terms = json::array();
    for (int k = 0; k < n; ++k) {
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(k)] = 'Z';
        terms.push_back({{"coeff", 0.5}, {"string", s}});
    }
    return {{"name", "ghz" + std::to_string(n)},
            {"type", "unitary-generator"},
            {"layout", std::vector<int>(static_cast<std::size_t>(n), 2)},
            {"notes", "n-qubit GHZ probe under a uniform z field, QFI n^2"},
            {"psi_in", real_vector(psi)},
            {"hamiltonian", terms},
            {"theta_grid", {{"lo", 0.0}, {"hi", 1.0}, {"count", kDefaultGridCount}}},
            {"prior", {0.0, 1.0}}};
}

json chain4_json() {
    std::vector<double> psi(16, 0.0);
    for (int k : {8, 4, 2, 1}) {
        psi[static_cast<std::size_t>(k)] = 0.5;
    }
    json terms = json::array({{{"coeff", 1.0}, {"string", "XXII"}},
                              {{"coeff", 1.0}, {"string", "IXXI"}},
                              {{"coeff", 1.0}, {"string", "IIXX"}}});
    return {{"name", "chain4"},
            {"type", "unitary-generator"},
            {"layout", {2, 2, 2, 2}},
            {"notes", "open XX chain on four qubits, one-excitation Dicke input"},
            {"psi_in", real_vector(psi)},
            {"hamiltonian", terms},
            {"domain", {{"lo", 0.0}, {"hi", kPi / 4}, {"open", false}}},
            {"theta_grid", {{"lo", 0.0}, {"hi", kPi / 4}, {"count", kDefaultGridCount}}}};
}

CMatrix bell_projector(int which) {
    const double r = 1.0 / std::sqrt(2.0);
    CVector v = CVector::Zero(4);
    switch (which) {
        case 1: v(0) = r, v(3) = r; break;   // phi+
        case 2: v(0) = r, v(3) = -r; break;  // phi-
        case 3: v(1) = r, v(2) = r; break;   // psi+
        default: v(1) = r, v(2) = -r; break; // psi-
    }
    return projector(v);
}

json bell_mixture_json() {
    CMatrix rho1 = 2.0 / 3.0 * bell_projector(1) + 1.0 / 3.0 * bell_projector(2);
    CMatrix rho2 = 1.0 / 3.0 * bell_projector(1) + 2.0 / 3.0 * bell_projector(3);
    return {{"name", "bell-mixture"},
            {"type", "mixed"},
            {"layout", {2, 2}},
            {"notes", "theta rho1 + (1 - theta) rho2 over three Bell states, rank three"},
            {"components",
             {{{"rho", to_json(rho1)}, {"weight", {{"offset", 0.0}, {"slope", 1.0}}}},
              {{"rho", to_json(rho2)}, {"weight", {{"offset", 1.0}, {"slope", -1.0}}}}}},
            {"domain", {{"lo", 0.0}, {"hi", 1.0}, {"open", true}}},
            {"theta_grid", {{"lo", 0.1}, {"hi", 0.9}, {"count", kDefaultGridCount}}}};
}

json ranktwo_bell_json() {
    const double r = 1.0 / std::sqrt(2.0);
    return {{"name", "ranktwo-bell"},
            {"type", "rank-two"},
            {"layout", {2, 2}},
            {"notes", "p |phi+><phi+| + (1 - p) |psi-><psi-| with p = theta"},
            {"psi0", {r, 0.0, 0.0, r}},
            {"psi1", {0.0, r, -r, 0.0}},
            {"p", {{"form", "linear"}, {"offset", 0.0}, {"slope", 1.0}}},
            {"domain", {{"lo", 0.0}, {"hi", 1.0}, {"open", true}}},
            {"theta_grid", {{"lo", 0.1}, {"hi", 0.9}, {"count", kDefaultGridCount}}}};
}

// psi_in = vec(A), generator i(|B><A| - |A><B|): at theta = 0 the state is A
// and its orthogonal derivative is B.
json bipartite_json(const std::string &name, const std::string &notes, std::size_t da, std::size_t db, const CMatrix &a,
                    const CMatrix &b) {
    CVector va(static_cast<Eigen::Index>(da * db)), vb(va.size());
    for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t k = 0; k < db; ++k) {
            va(static_cast<Eigen::Index>(i * db + k)) = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            vb(static_cast<Eigen::Index>(i * db + k)) = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }
    CMatrix g = Complex(0, 1) * (vb * va.adjoint() - va * vb.adjoint());
    return {{"name", name},
            {"type", "unitary-generator"},
            {"layout", {da, db}},
            {"notes", notes},
            {"psi_in", to_json(va)},
            {"hamiltonian", to_json(g)},
            {"theta_grid", {0.0}},
            {"prior", {-0.5, 0.5}}};
}

json lm_pair2_json() {
    const double r = 1.0 / std::sqrt(2.0);
    CMatrix a(2, 2), b(2, 2);
    a << r, 0, 0.5, 0.5;
    b << 0, r, 0.5, -0.5;
    return bipartite_json("lm-pair2", "2x2 pure pair whose saturating local measurement cannot discriminate psi from psi_perp",
                          2, 2, a, b);
}

json lm_pair3_json() {
    const double r = std::sqrt(2.0) / 2.0;
    CMatrix a = CMatrix::Zero(3, 3), b = CMatrix::Zero(3, 3);
    a.diagonal() << r, 0.5, 0.5;
    b.diagonal() << Complex(0, r), Complex(0, -0.5), Complex(0, -0.5);
    return bipartite_json("lm-pair3", "3x3 pure pair with no saturating projective local measurement", 3, 3, a, b);
}

json phase_json() {
    const double r = 1.0 / std::sqrt(2.0);
    return {{"name", "phase"},
            {"type", "unitary-generator"},
            {"layout", {2}},
            {"notes", "single qubit |+> under z/2, QFI 1"},
            {"psi_in", {r, r}},
            {"hamiltonian", json::array({{{"coeff", 0.5}, {"string", "Z"}}})},
            {"theta_grid", {{"lo", 0.0}, {"hi", 1.0}, {"count", kDefaultGridCount}}},
            {"prior", {0.0, 1.0}}};
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> out;
    for (int n = 2; n <= 8; ++n) {
        out.push_back("ghz" + std::to_string(n));
    }
    for (const char *s : {"chain4", "bell-mixture", "ranktwo-bell", "lm-pair2", "lm-pair3", "phase"}) {
        out.emplace_back(s);
    }
    return out;
}

std::optional<json> builtin_scenario_json(const std::string &name) {
    if (name.size() == 4 && name.rfind("ghz", 0) == 0 && name[3] >= '2' && name[3] <= '8') {
        return ghz_json(name[3] - '0');
    }
    if (name == "chain4") return chain4_json();
    if (name == "bell-mixture") return bell_mixture_json();
    if (name == "ranktwo-bell") return ranktwo_bell_json();
    if (name == "lm-pair2") return lm_pair2_json();
    if (name == "lm-pair3") return lm_pair3_json();
    if (name == "phase") return phase_json();
    return std::nullopt;
}

Scenario load_scenario(const std::string &name_or_path) {
    if (auto j = builtin_scenario_json(name_or_path)) {
        return scenario_from_json(*j);
    }
    std::ifstream in(name_or_path);
    if (!in) {
        throw ValidationError("unknown scenario '" + name_or_path + "' (not a builtin and no such file)");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw ValidationError("malformed scenario file '" + name_or_path + "': " + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception &e) {
        throw ValidationError("malformed scenario file '" + name_or_path + "': " + e.what());
    }
}

Scenario scenario_ghz(int n) {
    if (n < 2 || n > 8) {
        throw ValidationError("ghz scenario needs 2 <= n <= 8");
    }
    return scenario_from_json(ghz_json(n));
}

Scenario scenario_chain4() {
    return scenario_from_json(chain4_json());
}

Scenario scenario_bell_mixture() {
    return scenario_from_json(bell_mixture_json());
}

Scenario scenario_ranktwo(const CVector &psi0, const CVector &psi1, double offset, double slope,
                          const HilbertLayout &layout) {
    json j = {{"name", "ranktwo"},
              {"type", "rank-two"},
              {"layout", layout.dims()},
              {"psi0", to_json(psi0)},
              {"psi1", to_json(psi1)},
              {"p", {{"form", "linear"}, {"offset", offset}, {"slope", slope}}},
              {"domain", {{"lo", 0.0}, {"hi", 1.0}, {"open", true}}},
              {"theta_grid", {{"lo", 0.1}, {"hi", 0.9}, {"count", kDefaultGridCount}}}};
    return scenario_from_json(j);
}

}  // namespace qcrb
