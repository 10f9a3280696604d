// Copyright 2026 The magic-cert Authors
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

#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "magic_cert/event_graph.hpp"
#include "magic_cert/oracle.hpp"
#include "magic_cert/witness.hpp"

namespace magic_cert {

// ---------------------------------------------------------------------------
// SWAP test.

struct SwapSample {
    uint64_t zeros = 0;
    double estimate = 0.0;
};

/// The ancilla reads 0 with probability (1 + Tr(rho sigma)) / 2; the overlap
/// estimate is 2 zeros/shots - 1 clipped to [0,1].
template <typename Rng>
SwapSample swap_test_sample(const State &rho, const State &sigma, uint64_t shots, Rng &stream) {
    detail::require(shots >= 1, "swap test: shots must be >= 1");
    detail::require(dim_of(rho) == dim_of(sigma), "swap test: dimension mismatch");
    const double p = std::clamp((1.0 + overlap(rho, sigma)) / 2.0, 0.5, 1.0);
    std::binomial_distribution<uint64_t> outcome(shots, p);
    SwapSample s;
    s.zeros = outcome(stream);
    s.estimate = std::clamp(2.0 * static_cast<double>(s.zeros) / static_cast<double>(shots) - 1.0, 0.0, 1.0);
    return s;
}

// ---------------------------------------------------------------------------
// Scenario.

struct QpuSpec {
    std::string id;
    int qubit_capacity = 1;
    double depolarizing_nu = 0.0;
};

struct Assignment {
    enum class Kind { single, round_robin, explicit_map };
    Kind kind = Kind::round_robin;
    std::string qpu;                     // single
    std::map<Edge, std::string> edges;   // explicit_map

    static Assignment single(std::string id) { return {Kind::single, std::move(id), {}}; }
    static Assignment round_robin() { return {Kind::round_robin, {}, {}}; }
    static Assignment explicit_map(std::map<Edge, std::string> m) { return {Kind::explicit_map, {}, std::move(m)}; }
};

/// Who prepares the vertex states. qpu: each QPU prepares the states of its
/// edges, depolarized by its own nu. referee: a third party supplies the
/// ensemble, depolarized by source_nu, and QPUs only run the SWAP tests.
enum class StateSource { qpu, referee };

struct Scenario {
    int n = 1;
    std::map<int, StateLabel> vertices;
    LinearFunctional functional = cm_functional(3);
    nlohmann::json functional_spec = "c3";
    std::vector<QpuSpec> qpus;
    Assignment assignment;
    uint64_t shots_per_edge = 1000;
    double delta = 0.05;
    uint64_t master_seed = 0;
    StateSource state_source = StateSource::qpu;
    double source_nu = 0.0;
    bool full_set_magic = false;
};

/// Carries every validation problem found, each prefixed with a JSON path.
class ScenarioError : public InvalidInput {
   public:
    explicit ScenarioError(std::vector<std::string> problems)
        : InvalidInput(problems.empty() ? "invalid scenario" : problems.front()), problems_(std::move(problems)) {}
    const std::vector<std::string> &problems() const { return problems_; }

   private:
    std::vector<std::string> problems_;
};

/// Edge -> QPU id over the support of f, in canonical edge order.
inline std::map<Edge, std::string> assign_edges(const LinearFunctional &f, const Assignment &assignment,
                                                const std::vector<QpuSpec> &qpus, int n) {
    detail::require(!qpus.empty(), "assignment: no QPUs declared");
    std::map<std::string, const QpuSpec *> by_id;
    for (const auto &q : qpus) {
        by_id[q.id] = &q;
    }
    std::map<Edge, std::string> out;
    const auto support = f.support();
    for (size_t k = 0; k < support.size(); ++k) {
        const Edge &e = f.graph.edge(support[k]);
        std::string id;
        switch (assignment.kind) {
            case Assignment::Kind::single: id = assignment.qpu; break;
            case Assignment::Kind::round_robin: id = qpus[k % qpus.size()].id; break;
            case Assignment::Kind::explicit_map: {
                auto it = assignment.edges.find(e);
                detail::require(it != assignment.edges.end(), "assignment: edge " + e.str() + " is not covered");
                id = it->second;
                break;
            }
        }
        auto q = by_id.find(id);
        detail::require(q != by_id.end(), "assignment: edge " + e.str() + " uses unknown QPU '" + id + "'");
        detail::require(q->second->qubit_capacity >= 2 * n + 1,
                        "assignment: QPU '" + id + "' lacks capacity for edge " + e.str() + " (needs " +
                            std::to_string(2 * n + 1) + " qubits)");
        out[e] = id;
    }
    if (assignment.kind == Assignment::Kind::explicit_map) {
        for (const auto &[e, id] : assignment.edges) {
            detail::require(out.count(e) == 1, "assignment: edge " + e.str() + " is not in the functional support");
        }
    }
    return out;
}

inline std::vector<std::string> validate_scenario(const Scenario &s) {
    std::vector<std::string> problems;
    auto check = [&](bool ok, const std::string &msg) {
        if (!ok) {
            problems.push_back(msg);
        }
    };
    check(s.n >= 1 && s.n <= 10, "$.n: qubit count must lie in 1..10");
    check(s.shots_per_edge >= 1, "$.shots_per_edge: must be >= 1");
    check(s.delta > 0.0 && s.delta < 1.0, "$.delta: must lie in (0,1)");
    check(s.source_nu >= 0.0 && s.source_nu <= 1.0, "$.source_nu: must lie in [0,1]");
    check(!s.qpus.empty(), "$.qpus: at least one QPU is required");
    std::set<std::string> ids;
    for (size_t i = 0; i < s.qpus.size(); ++i) {
        const auto &q = s.qpus[i];
        const std::string path = "$.qpus[" + std::to_string(i) + "]";
        check(ids.insert(q.id).second, path + ".id: duplicate QPU id '" + q.id + "'");
        check(q.qubit_capacity >= 1, path + ".qubit_capacity: must be positive");
        check(q.depolarizing_nu >= 0.0 && q.depolarizing_nu <= 1.0, path + ".depolarizing_nu: must lie in [0,1]");
    }
    check(proven_witness_threshold(s.functional).has_value(),
          "$.functional: '" + s.functional.name + "' is not a certifiable witness (cycle inequality or h4)");
    if (s.full_set_magic) {
        const int m = s.functional.graph.vertex_count();
        check(s.n == 1, "$.full_set_magic: requires single-qubit states (n = 1)");
        const bool odd_cycle = m >= 3 && m <= 9 && m % 2 == 1 && s.functional.graph == cycle_graph(m) &&
                               s.functional.coefficients == cm_functional(m).coefficients;
        check(odd_cycle, "$.full_set_magic: requires an odd cycle functional c3, c5, c7 or c9");
    }
    for (int v = 1; v <= s.functional.graph.vertex_count(); ++v) {
        const std::string path = "$.vertices." + std::to_string(v);
        auto it = s.vertices.find(v);
        if (it == s.vertices.end()) {
            problems.push_back(path + ": missing state label");
            continue;
        }
        try {
            (void)named_state(it->second, s.n);
        } catch (const InvalidInput &e) {
            problems.push_back(path + ": " + e.what());
        }
    }
    for (const auto &[v, label] : s.vertices) {
        check(v >= 1 && v <= s.functional.graph.vertex_count(),
              "$.vertices." + std::to_string(v) + ": vertex not in the functional's graph");
    }
    if (problems.empty()) {
        try {
            (void)assign_edges(s.functional, s.assignment, s.qpus, s.n);
        } catch (const InvalidInput &e) {
            problems.push_back(std::string("$.assignment: ") + e.what());
        }
    }
    return problems;
}

// ---------------------------------------------------------------------------
// Run report.

struct EdgeRecord {
    OverlapEstimate estimate;
    std::string qpu;
    uint64_t zeros = 0;
    double prepared_overlap = 0.0;  // Tr(rho sigma) of the states actually prepared
};

struct QpuWorkload {
    std::string qpu;
    std::vector<Edge> edges;
    uint64_t total_shots = 0;
};

struct RunReport {
    std::string functional;
    std::vector<EdgeRecord> edges;
    std::vector<QpuWorkload> workload;
    Verdict verdict;
    double per_edge_delta = 0.0;
    StateSource state_source = StateSource::qpu;
    uint64_t master_seed = 0;
    std::string timestamp;  // empty unless the caller stamps the report
};

/// Samples every support edge on its assigned QPU and certifies the result.
/// Each edge draws from its own stream seeded by (master_seed, edge index), so
/// the QPU assignment never changes the sampled counts.
inline RunReport run_scenario(const Scenario &s) {
    auto problems = validate_scenario(s);
    if (!problems.empty()) {
        throw ScenarioError(std::move(problems));
    }
    const LinearFunctional &f = s.functional;
    const auto owner = assign_edges(f, s.assignment, s.qpus, s.n);
    std::map<std::string, const QpuSpec *> by_id;
    for (const auto &q : s.qpus) {
        by_id[q.id] = &q;
    }
    std::map<int, DensityMatrix> ideal;
    for (const auto &[v, label] : s.vertices) {
        ideal.emplace(v, DensityMatrix(named_state(label, s.n)));
    }

    const auto support = f.support();
    RunReport report;
    report.functional = f.name;
    report.state_source = s.state_source;
    report.master_seed = s.master_seed;
    report.per_edge_delta = s.delta / static_cast<double>(support.size());
    const double ci = hoeffding_halfwidth(s.shots_per_edge, report.per_edge_delta);

    report.edges.resize(support.size());
    detail::parallel_for(support.size(), [&](size_t k) {
        const size_t edge_index = support[k];
        const Edge &e = f.graph.edge(edge_index);
        const std::string &qpu = owner.at(e);
        const double nu = s.state_source == StateSource::qpu ? by_id.at(qpu)->depolarizing_nu : s.source_nu;
        const DensityMatrix rho = depolarize(ideal.at(e.u), nu);
        const DensityMatrix sigma = depolarize(ideal.at(e.v), nu);
        std::mt19937_64 stream(detail::derive_seed(s.master_seed, edge_index));
        const SwapSample sample = swap_test_sample(rho, sigma, s.shots_per_edge, stream);
        EdgeRecord &rec = report.edges[k];
        rec.estimate = {e, sample.estimate, s.shots_per_edge, ci, EstimateMethod::swap_test};
        rec.qpu = qpu;
        rec.zeros = sample.zeros;
        rec.prepared_overlap = overlap(rho, sigma);
    });

    for (const auto &q : s.qpus) {
        QpuWorkload w;
        w.qpu = q.id;
        for (const auto &rec : report.edges) {
            if (rec.qpu == q.id) {
                w.edges.push_back(rec.estimate.edge);
                w.total_shots += rec.estimate.shots;
            }
        }
        report.workload.push_back(std::move(w));
    }

    std::vector<OverlapEstimate> estimates;
    for (const auto &rec : report.edges) {
        estimates.push_back(rec.estimate);
    }
    if (s.full_set_magic) {
        const int m = f.graph.vertex_count();
        report.verdict =
            certify_full_set_magic(m, estimates, s.delta, full_set_magic_thresholds_from_oracle({m}), true);
    } else {
        report.verdict = certify_set_magic(f, estimates, s.delta);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scenario document (strict schema).

namespace detail {

class SchemaChecker {
   public:
    void fail(const std::string &path, const std::string &msg) { problems.push_back(path + ": " + msg); }

    void only_keys(const nlohmann::json &j, const std::string &path, std::initializer_list<const char *> keys) {
        for (const auto &[key, value] : j.items()) {
            bool known = false;
            for (const char *k : keys) {
                known = known || key == k;
            }
            if (!known) {
                fail(path + "." + key, "unknown field");
            }
        }
    }

    bool has(const nlohmann::json &j, const std::string &path, const char *key) {
        if (!j.contains(key)) {
            fail(path + "." + key, "missing field");
            return false;
        }
        return true;
    }

    std::vector<std::string> problems;
};

inline StateLabel label_from_json(const nlohmann::json &j, const std::string &path, SchemaChecker &check) {
    if (j.is_string()) {
        try {
            return parse_named_label(j.get<std::string>());
        } catch (const InvalidInput &e) {
            check.fail(path, e.what());
            return {};
        }
    }
    if (!j.is_object() || j.size() != 1) {
        check.fail(path, "expected a label name, {\"computational\": bits} or {\"explicit\": [[re,im],...]}");
        return {};
    }
    if (j.contains("computational")) {
        if (!j["computational"].is_string()) {
            check.fail(path + ".computational", "expected bitstring");
            return {};
        }
        return StateLabel::computational_basis(j["computational"].get<std::string>());
    }
    if (j.contains("explicit")) {
        const auto &amps = j["explicit"];
        if (!amps.is_array() || amps.empty()) {
            check.fail(path + ".explicit", "expected nonempty array of [re,im]");
            return {};
        }
        Vector v(static_cast<Eigen::Index>(amps.size()));
        for (size_t i = 0; i < amps.size(); ++i) {
            const auto &a = amps[i];
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
                check.fail(path + ".explicit[" + std::to_string(i) + "]", "expected [re,im]");
                return {};
            }
            v(static_cast<Eigen::Index>(i)) = Complex(a[0].get<double>(), a[1].get<double>());
        }
        // Decimal round-off in hand-written files is tolerated up to 1e-6.
        if (std::abs(v.norm() - 1.0) > 1e-6) {
            check.fail(path + ".explicit", "amplitudes are not normalized");
            return {};
        }
        return StateLabel::explicit_state(v / v.norm());
    }
    check.fail(path, "unknown label form");
    return {};
}

inline nlohmann::json label_to_json(const StateLabel &l) {
    switch (l.kind) {
        case StateLabel::Kind::computational: return {{"computational", l.bits}};
        case StateLabel::Kind::explicit_amplitudes: {
            nlohmann::json amps = nlohmann::json::array();
            for (Eigen::Index i = 0; i < l.amplitudes.size(); ++i) {
                amps.push_back({l.amplitudes(i).real(), l.amplitudes(i).imag()});
            }
            return {{"explicit", amps}};
        }
        default: return label_name(l.kind);
    }
}

inline bool parse_edge(const nlohmann::json &j, Edge &out) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        return false;
    }
    out = Edge(j[0].get<int>(), j[1].get<int>());
    return true;
}

inline bool json_uint(const nlohmann::json &j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<int64_t>() >= 0);
}

}  // namespace detail

/// Parses and validates a scenario document. Throws ScenarioError listing
/// every problem found, schema problems first.
inline Scenario scenario_from_json(const nlohmann::json &j) {
    detail::SchemaChecker check;
    Scenario s;
    if (!j.is_object()) {
        throw ScenarioError({"$: scenario must be a JSON object"});
    }
    check.only_keys(j, "$",
                    {"n", "vertices", "functional", "qpus", "assignment", "shots_per_edge", "delta", "master_seed",
                     "state_source", "source_nu", "full_set_magic"});
    if (check.has(j, "$", "n")) {
        if (j["n"].is_number_integer()) {
            s.n = j["n"].get<int>();
        } else {
            check.fail("$.n", "expected integer");
        }
    }
    if (check.has(j, "$", "functional")) {
        const auto &fj = j["functional"];
        try {
            s.functional = fj.is_string() ? functional_by_name(fj.get<std::string>())
                                          : functional_from_json(fj, "$.functional");
            s.functional_spec = fj;
        } catch (const InvalidInput &e) {
            std::string msg = e.what();
            check.problems.push_back(msg.rfind("$", 0) == 0 ? msg : "$.functional: " + msg);
        }
    }
    if (check.has(j, "$", "vertices")) {
        const auto &vj = j["vertices"];
        if (!vj.is_object()) {
            check.fail("$.vertices", "expected object mapping vertex number to label");
        } else {
            for (const auto &[key, value] : vj.items()) {
                const std::string path = "$.vertices." + key;
                int vertex = 0;
                try {
                    size_t used = 0;
                    vertex = std::stoi(key, &used);
                    if (used != key.size()) {
                        throw std::invalid_argument(key);
                    }
                } catch (const std::exception &) {
                    check.fail(path, "vertex key must be an integer");
                    continue;
                }
                s.vertices[vertex] = detail::label_from_json(value, path, check);
            }
        }
    }
    if (check.has(j, "$", "qpus")) {
        const auto &qj = j["qpus"];
        if (!qj.is_array()) {
            check.fail("$.qpus", "expected array");
        } else {
            for (size_t i = 0; i < qj.size(); ++i) {
                const std::string path = "$.qpus[" + std::to_string(i) + "]";
                const auto &q = qj[i];
                if (!q.is_object()) {
                    check.fail(path, "expected object");
                    continue;
                }
                check.only_keys(q, path, {"id", "qubit_capacity", "depolarizing_nu"});
                QpuSpec spec;
                if (check.has(q, path, "id")) {
                    if (q["id"].is_string()) {
                        spec.id = q["id"].get<std::string>();
                    } else {
                        check.fail(path + ".id", "expected string");
                    }
                }
                if (check.has(q, path, "qubit_capacity")) {
                    if (q["qubit_capacity"].is_number_integer()) {
                        spec.qubit_capacity = q["qubit_capacity"].get<int>();
                    } else {
                        check.fail(path + ".qubit_capacity", "expected integer");
                    }
                }
                if (q.contains("depolarizing_nu")) {
                    if (q["depolarizing_nu"].is_number()) {
                        spec.depolarizing_nu = q["depolarizing_nu"].get<double>();
                    } else {
                        check.fail(path + ".depolarizing_nu", "expected number");
                    }
                }
                s.qpus.push_back(spec);
            }
        }
    }
    if (check.has(j, "$", "assignment")) {
        const auto &aj = j["assignment"];
        if (aj.is_string() && aj.get<std::string>() == "round_robin") {
            s.assignment = Assignment::round_robin();
        } else if (aj.is_object() && aj.size() == 1 && aj.contains("single")) {
            if (aj["single"].is_string()) {
                s.assignment = Assignment::single(aj["single"].get<std::string>());
            } else {
                check.fail("$.assignment.single", "expected QPU id");
            }
        } else if (aj.is_object() && aj.size() == 1 && aj.contains("explicit")) {
            const auto &ej = aj["explicit"];
            std::map<Edge, std::string> edges;
            if (!ej.is_array()) {
                check.fail("$.assignment.explicit", "expected array of {\"edge\": [i,j], \"qpu\": id}");
            } else {
                for (size_t i = 0; i < ej.size(); ++i) {
                    const std::string path = "$.assignment.explicit[" + std::to_string(i) + "]";
                    Edge e;
                    if (!ej[i].is_object() || !ej[i].contains("edge") || !ej[i].contains("qpu") ||
                        ej[i].size() != 2 || !detail::parse_edge(ej[i]["edge"], e) || !ej[i]["qpu"].is_string()) {
                        check.fail(path, "expected {\"edge\": [i,j], \"qpu\": id}");
                        continue;
                    }
                    if (!edges.emplace(e, ej[i]["qpu"].get<std::string>()).second) {
                        check.fail(path, "edge " + e.str() + " assigned twice");
                    }
                }
            }
            s.assignment = Assignment::explicit_map(std::move(edges));
        } else {
            check.fail("$.assignment", "expected \"round_robin\", {\"single\": id} or {\"explicit\": [...]}");
        }
    }
    if (check.has(j, "$", "shots_per_edge")) {
        if (detail::json_uint(j["shots_per_edge"])) {
            s.shots_per_edge = j["shots_per_edge"].get<uint64_t>();
        } else {
            check.fail("$.shots_per_edge", "expected nonnegative integer");
        }
    }
    if (check.has(j, "$", "delta")) {
        if (j["delta"].is_number()) {
            s.delta = j["delta"].get<double>();
        } else {
            check.fail("$.delta", "expected number");
        }
    }
    if (check.has(j, "$", "master_seed")) {
        if (detail::json_uint(j["master_seed"])) {
            s.master_seed = j["master_seed"].get<uint64_t>();
        } else {
            check.fail("$.master_seed", "expected nonnegative integer");
        }
    }
    if (j.contains("state_source")) {
        const auto &src = j["state_source"];
        if (src == "qpu") {
            s.state_source = StateSource::qpu;
        } else if (src == "referee") {
            s.state_source = StateSource::referee;
        } else {
            check.fail("$.state_source", "expected \"qpu\" or \"referee\"");
        }
    }
    if (j.contains("source_nu")) {
        if (j["source_nu"].is_number()) {
            s.source_nu = j["source_nu"].get<double>();
        } else {
            check.fail("$.source_nu", "expected number");
        }
    }
    if (j.contains("full_set_magic")) {
        if (j["full_set_magic"].is_boolean()) {
            s.full_set_magic = j["full_set_magic"].get<bool>();
        } else {
            check.fail("$.full_set_magic", "expected boolean");
        }
    }
    if (check.problems.empty()) {
        check.problems = validate_scenario(s);
    }
    if (!check.problems.empty()) {
        throw ScenarioError(std::move(check.problems));
    }
    return s;
}

inline nlohmann::json to_json(const Scenario &s) {
    nlohmann::json vertices = nlohmann::json::object();
    for (const auto &[v, label] : s.vertices) {
        vertices[std::to_string(v)] = detail::label_to_json(label);
    }
    nlohmann::json qpus = nlohmann::json::array();
    for (const auto &q : s.qpus) {
        qpus.push_back({{"id", q.id}, {"qubit_capacity", q.qubit_capacity}, {"depolarizing_nu", q.depolarizing_nu}});
    }
    nlohmann::json assignment;
    switch (s.assignment.kind) {
        case Assignment::Kind::single: assignment = {{"single", s.assignment.qpu}}; break;
        case Assignment::Kind::round_robin: assignment = "round_robin"; break;
        case Assignment::Kind::explicit_map: {
            nlohmann::json list = nlohmann::json::array();
            for (const auto &[e, id] : s.assignment.edges) {
                list.push_back({{"edge", {e.u, e.v}}, {"qpu", id}});
            }
            assignment = {{"explicit", list}};
            break;
        }
    }
    nlohmann::json j = {{"n", s.n},
                        {"vertices", vertices},
                        {"functional", s.functional_spec},
                        {"qpus", qpus},
                        {"assignment", assignment},
                        {"shots_per_edge", s.shots_per_edge},
                        {"delta", s.delta},
                        {"master_seed", s.master_seed},
                        {"state_source", s.state_source == StateSource::qpu ? "qpu" : "referee"}};
    if (s.source_nu != 0.0) {
        j["source_nu"] = s.source_nu;
    }
    if (s.full_set_magic) {
        j["full_set_magic"] = true;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Report document.

inline nlohmann::json to_json(const RunReport &r) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &rec : r.edges) {
        nlohmann::json e = to_json(rec.estimate);
        e["qpu"] = rec.qpu;
        e["zeros"] = rec.zeros;
        e["prepared_overlap"] = rec.prepared_overlap;
        edges.push_back(std::move(e));
    }
    nlohmann::json workload = nlohmann::json::array();
    for (const auto &w : r.workload) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto &e : w.edges) {
            list.push_back({e.u, e.v});
        }
        workload.push_back({{"qpu", w.qpu}, {"edges", list}, {"total_shots", w.total_shots}});
    }
    return {{"functional", r.functional},
            {"estimates", edges},
            {"workload", workload},
            {"verdict", to_json(r.verdict)},
            {"per_edge_delta", r.per_edge_delta},
            {"state_source", r.state_source == StateSource::qpu ? "qpu" : "referee"},
            {"meta", {{"master_seed", r.master_seed}, {"timestamp", r.timestamp}}}};
}

/// Strict inverse of to_json(RunReport); throws ScenarioError on any schema problem.
inline RunReport run_report_from_json(const nlohmann::json &j) {
    detail::SchemaChecker check;
    RunReport r;
    auto fail_now = [&] { throw ScenarioError(std::move(check.problems)); };
    if (!j.is_object()) {
        throw ScenarioError({"$: report must be a JSON object"});
    }
    check.only_keys(j, "$", {"functional", "estimates", "workload", "verdict", "per_edge_delta", "state_source", "meta"});
    for (const char *key : {"functional", "estimates", "workload", "verdict", "per_edge_delta", "state_source", "meta"}) {
        check.has(j, "$", key);
    }
    if (!check.problems.empty()) {
        fail_now();
    }
    auto parse_estimate = [&](const nlohmann::json &e, const std::string &path, bool with_qpu) {
        EdgeRecord rec;
        if (!e.is_object()) {
            check.fail(path, "expected object");
            return rec;
        }
        if (with_qpu) {
            check.only_keys(e, path, {"edge", "mean", "shots", "ci", "method", "qpu", "zeros", "prepared_overlap"});
        } else {
            check.only_keys(e, path, {"edge", "mean", "shots", "ci", "method"});
        }
        if (!e.contains("edge") || !detail::parse_edge(e["edge"], rec.estimate.edge)) {
            check.fail(path + ".edge", "expected [i,j]");
        }
        if (!e.contains("mean") || !e["mean"].is_number()) {
            check.fail(path + ".mean", "expected number");
        } else if (e["mean"].get<double>() < 0.0 || e["mean"].get<double>() > 1.0) {
            check.fail(path + ".mean", "must lie in [0,1]");
        } else {
            rec.estimate.mean = e["mean"].get<double>();
        }
        if (!e.contains("ci") || !e["ci"].is_number()) {
            check.fail(path + ".ci", "expected number");
        } else if (e["ci"].get<double>() < 0.0) {
            check.fail(path + ".ci", "must be >= 0");
        } else {
            rec.estimate.ci_halfwidth = e["ci"].get<double>();
        }
        if (!e.contains("shots") || !detail::json_uint(e["shots"])) {
            check.fail(path + ".shots", "expected nonnegative integer");
        } else {
            rec.estimate.shots = e["shots"].get<uint64_t>();
        }
        if (!e.contains("method") || (e["method"] != "exact" && e["method"] != "swap_test")) {
            check.fail(path + ".method", "expected \"exact\" or \"swap_test\"");
        } else {
            rec.estimate.method = e["method"] == "exact" ? EstimateMethod::exact : EstimateMethod::swap_test;
        }
        if (with_qpu) {
            if (!e.contains("qpu") || !e["qpu"].is_string()) {
                check.fail(path + ".qpu", "expected string");
            } else {
                rec.qpu = e["qpu"].get<std::string>();
            }
            if (!e.contains("zeros") || !detail::json_uint(e["zeros"])) {
                check.fail(path + ".zeros", "expected nonnegative integer");
            } else {
                rec.zeros = e["zeros"].get<uint64_t>();
            }
            if (!e.contains("prepared_overlap") || !e["prepared_overlap"].is_number()) {
                check.fail(path + ".prepared_overlap", "expected number");
            } else {
                rec.prepared_overlap = e["prepared_overlap"].get<double>();
            }
        }
        return rec;
    };
    if (j["functional"].is_string()) {
        r.functional = j["functional"].get<std::string>();
    } else {
        check.fail("$.functional", "expected string");
    }
    if (!j["estimates"].is_array()) {
        check.fail("$.estimates", "expected array");
    } else {
        for (size_t i = 0; i < j["estimates"].size(); ++i) {
            r.edges.push_back(parse_estimate(j["estimates"][i], "$.estimates[" + std::to_string(i) + "]", true));
        }
    }
    if (!j["workload"].is_array()) {
        check.fail("$.workload", "expected array");
    } else {
        for (size_t i = 0; i < j["workload"].size(); ++i) {
            const auto &w = j["workload"][i];
            const std::string path = "$.workload[" + std::to_string(i) + "]";
            QpuWorkload load;
            if (!w.is_object() || !w.contains("qpu") || !w["qpu"].is_string() || !w.contains("edges") ||
                !w["edges"].is_array() || !w.contains("total_shots") || !detail::json_uint(w["total_shots"])) {
                check.fail(path, "expected {\"qpu\", \"edges\", \"total_shots\"}");
                continue;
            }
            check.only_keys(w, path, {"qpu", "edges", "total_shots"});
            load.qpu = w["qpu"].get<std::string>();
            load.total_shots = w["total_shots"].get<uint64_t>();
            for (const auto &ej : w["edges"]) {
                Edge e;
                if (detail::parse_edge(ej, e)) {
                    load.edges.push_back(e);
                } else {
                    check.fail(path + ".edges", "expected [i,j] entries");
                }
            }
            r.workload.push_back(std::move(load));
        }
    }
    const auto &v = j["verdict"];
    const std::string vpath = "$.verdict";
    if (!v.is_object()) {
        check.fail(vpath, "expected object");
    } else {
        check.only_keys(v, vpath,
                        {"kind", "functional", "point", "conservative", "threshold", "confidence", "protocol", "edges"});
        if (v.contains("kind") && v["kind"] == "none") {
            r.verdict.kind = VerdictKind::none;
        } else if (v.contains("kind") && v["kind"] == "set_magic") {
            r.verdict.kind = VerdictKind::set_magic;
        } else if (v.contains("kind") && v["kind"] == "full_set_magic") {
            r.verdict.kind = VerdictKind::full_set_magic;
        } else {
            check.fail(vpath + ".kind", "expected none, set_magic or full_set_magic");
        }
        if (v.contains("functional") && v["functional"].is_string()) {
            r.verdict.functional = v["functional"].get<std::string>();
        } else {
            check.fail(vpath + ".functional", "expected string");
        }
        auto number = [&](const char *key, double &out) {
            if (v.contains(key) && v[key].is_number()) {
                out = v[key].get<double>();
            } else {
                check.fail(vpath + "." + key, "expected number");
            }
        };
        number("point", r.verdict.point_value);
        number("conservative", r.verdict.conservative_value);
        number("threshold", r.verdict.threshold);
        number("confidence", r.verdict.confidence);
        if (!v.contains("protocol") || v["protocol"] != kConfidenceProtocol) {
            check.fail(vpath + ".protocol", std::string("expected \"") + kConfidenceProtocol + "\"");
        }
        if (!v.contains("edges") || !v["edges"].is_array()) {
            check.fail(vpath + ".edges", "expected array");
        } else {
            for (size_t i = 0; i < v["edges"].size(); ++i) {
                r.verdict.edges.push_back(
                    parse_estimate(v["edges"][i], vpath + ".edges[" + std::to_string(i) + "]", false).estimate);
            }
        }
        if (r.verdict.kind != VerdictKind::none && !(r.verdict.conservative_value > r.verdict.threshold)) {
            check.fail(vpath, "magic verdict requires conservative > threshold");
        }
    }
    if (j["per_edge_delta"].is_number()) {
        r.per_edge_delta = j["per_edge_delta"].get<double>();
    } else {
        check.fail("$.per_edge_delta", "expected number");
    }
    if (j["state_source"] == "qpu" || j["state_source"] == "referee") {
        r.state_source = j["state_source"] == "qpu" ? StateSource::qpu : StateSource::referee;
    } else {
        check.fail("$.state_source", "expected \"qpu\" or \"referee\"");
    }
    const auto &meta = j["meta"];
    if (!meta.is_object() || !meta.contains("master_seed") || !detail::json_uint(meta["master_seed"]) ||
        !meta.contains("timestamp") || !meta["timestamp"].is_string()) {
        check.fail("$.meta", "expected {\"master_seed\": int, \"timestamp\": string}");
    } else {
        check.only_keys(meta, "$.meta", {"master_seed", "timestamp"});
        r.master_seed = meta["master_seed"].get<uint64_t>();
        r.timestamp = meta["timestamp"].get<std::string>();
    }
    // Workload must partition the estimated edges.
    std::multiset<Edge> assigned;
    for (const auto &w : r.workload) {
        assigned.insert(w.edges.begin(), w.edges.end());
    }
    std::multiset<Edge> estimated;
    for (const auto &rec : r.edges) {
        estimated.insert(rec.estimate.edge);
    }
    if (assigned != estimated) {
        check.fail("$.workload", "workload edge sets do not partition the estimated edges");
    }
    if (!check.problems.empty()) {
        fail_now();
    }
    return r;
}

/// Columns: edge_i, edge_j, mean, ci, shots, qpu.
inline void write_estimates_csv(std::ostream &out, const RunReport &r) {
    out << "edge_i,edge_j,mean,ci,shots,qpu\n";
    out << std::setprecision(17);
    for (const auto &rec : r.edges) {
        out << rec.estimate.edge.u << "," << rec.estimate.edge.v << "," << rec.estimate.mean << ","
            << rec.estimate.ci_halfwidth << "," << rec.estimate.shots << "," << rec.qpu << "\n";
    }
}

}  // namespace magic_cert
