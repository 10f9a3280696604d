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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "magic_cert/network.hpp"

namespace {

using namespace magic_cert;
using K = StateLabel::Kind;

std::vector<QpuSpec> three_qpus(double nu = 0.0) {
    return {{"A", 3, nu}, {"B", 3, nu}, {"C", 3, nu}};
}

Scenario analytic_c3(uint64_t shots, uint64_t seed) {
    Scenario s;
    s.n = 1;
    s.functional = cm_functional(3);
    s.functional_spec = "c3";
    auto sol = analytic_cycle_states(3);
    for (int v = 1; v <= 3; ++v) {
        s.vertices[v] = StateLabel::explicit_state(sol.states[static_cast<size_t>(v - 1)].amplitudes());
    }
    s.qpus = three_qpus();
    s.assignment = Assignment::round_robin();
    s.shots_per_edge = shots;
    s.delta = 0.05;
    s.master_seed = seed;
    return s;
}

Scenario stabilizer_c3(uint64_t shots, uint64_t seed) {
    Scenario s = analytic_c3(shots, seed);
    s.vertices = {{1, StateLabel::named(K::zero)}, {2, StateLabel::named(K::plus)}, {3, StateLabel::named(K::one)}};
    return s;
}

TEST(SwapTestTest, IdenticalStates) {
    std::mt19937_64 rng(1);
    PureState p = random_pure(2, 5);
    for (int k = 0; k < 10; ++k) {
        SwapSample s = swap_test_sample(State(p), State(p), 1000, rng);
        EXPECT_EQ(s.zeros, 1000u);
        EXPECT_EQ(s.estimate, 1.0);
    }
}

TEST(SwapTestTest, OrthogonalStates) {
    std::mt19937_64 rng(2);
    SwapSample s = swap_test_sample(State(named_state(K::zero, 1)), State(named_state(K::one, 1)), 1000000, rng);
    EXPECT_LT(s.estimate, 0.005);
    EXPECT_NEAR(2.0 * static_cast<double>(s.zeros) / 1e6 - 1.0, 0.0, 0.005);
}

TEST(SwapTestTest, HalfOverlapConcentrates) {
    const State a = named_state(K::zero, 1), b = named_state(K::plus, 1);
    int inside = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        inside += std::abs(swap_test_sample(a, b, 1000000, rng).estimate - 0.5) < 0.005;
    }
    EXPECT_GE(inside, 99);
}

TEST(SwapTestTest, RejectsBadInput) {
    std::mt19937_64 rng(3);
    EXPECT_THROW(swap_test_sample(State(named_state(K::zero, 1)), State(named_state(K::zero, 2)), 10, rng),
                 InvalidInput);
    EXPECT_THROW(swap_test_sample(State(named_state(K::zero, 1)), State(named_state(K::zero, 1)), 0, rng),
                 InvalidInput);
}

TEST(SwapTestTest, ConsistentAtManyShots) {
    std::mt19937_64 rng(4);
    for (uint64_t k = 0; k < 20; ++k) {
        PureState a = random_pure(2, 100 + k), b = random_pure(2, 200 + k);
        SwapSample s = swap_test_sample(State(a), State(b), 10000000, rng);
        EXPECT_LT(std::abs(s.estimate - overlap(a, b)), 0.002) << "pair " << k;
    }
}

TEST(AssignTest, Strategies) {
    LinearFunctional c3 = cm_functional(3);
    auto rr = assign_edges(c3, Assignment::round_robin(), three_qpus(), 1);
    EXPECT_EQ(rr.at(Edge(1, 2)), "A");
    EXPECT_EQ(rr.at(Edge(2, 3)), "B");
    EXPECT_EQ(rr.at(Edge(1, 3)), "C");
    auto single = assign_edges(c3, Assignment::single("A"), three_qpus(), 1);
    for (const auto &[e, id] : single) EXPECT_EQ(id, "A");
    EXPECT_EQ(single.size(), 3u);
    std::map<Edge, std::string> map = {{Edge(1, 2), "B"}, {Edge(2, 3), "B"}, {Edge(1, 3), "A"}};
    EXPECT_EQ(assign_edges(c3, Assignment::explicit_map(map), three_qpus(), 1), map);
}

TEST(AssignTest, Errors) {
    LinearFunctional c3 = cm_functional(3);
    EXPECT_THROW(assign_edges(c3, Assignment::single("Z"), three_qpus(), 1), InvalidInput);
    std::map<Edge, std::string> partial = {{Edge(1, 2), "A"}, {Edge(2, 3), "A"}};
    EXPECT_THROW(assign_edges(c3, Assignment::explicit_map(partial), three_qpus(), 1), InvalidInput);
    auto extra = partial;
    extra[Edge(1, 3)] = "A";
    extra[Edge(1, 4)] = "A";
    EXPECT_THROW(assign_edges(c3, Assignment::explicit_map(extra), three_qpus(), 1), InvalidInput);
    // A SWAP test on two 2-qubit states needs 5 qubits.
    try {
        assign_edges(c3, Assignment::single("A"), three_qpus(), 2);
        FAIL() << "expected a capacity error";
    } catch (const InvalidInput &e) {
        EXPECT_NE(std::string(e.what()).find("{1,2}"), std::string::npos);
    }
    EXPECT_THROW(assign_edges(c3, Assignment::round_robin(), {}, 1), InvalidInput);
}

TEST(AssignTest, PerDeviceVersusDistributedWorkload) {
    // Certifying each of s QPUs individually costs s*m overlaps; distributing costs m.
    const int m = 5;
    LinearFunctional f = cm_functional(m);
    auto qpus = three_qpus();
    size_t per_device = 0;
    for (const auto &q : qpus) per_device += assign_edges(f, Assignment::single(q.id), qpus, 1).size();
    EXPECT_EQ(per_device, qpus.size() * m);
    EXPECT_EQ(assign_edges(f, Assignment::round_robin(), qpus, 1).size(), static_cast<size_t>(m));
}

TEST(RunScenarioTest, AnalyticOptimumCertifies) {
    RunReport r = run_scenario(analytic_c3(1000000, 2026));
    EXPECT_EQ(r.verdict.kind, VerdictKind::set_magic);
    EXPECT_NEAR(r.verdict.confidence, 0.95, 1e-12);
    EXPECT_NEAR(r.verdict.point_value, 1.25, 0.01);
    EXPECT_NEAR(r.per_edge_delta, 0.05 / 3, 1e-15);
    for (const auto &rec : r.edges) {
        EXPECT_NEAR(rec.estimate.ci_halfwidth, hoeffding_halfwidth(1000000, 0.05 / 3), 1e-15);
        EXPECT_EQ(rec.estimate.method, EstimateMethod::swap_test);
    }
    EXPECT_TRUE(r.timestamp.empty());
}

TEST(RunScenarioTest, StabilizerStatesNeverCertify) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        for (uint64_t shots : {100u, 10000u}) {
            EXPECT_EQ(run_scenario(stabilizer_c3(shots, seed)).verdict.kind, VerdictKind::none);
        }
    }
}

TEST(RunScenarioTest, FullyDepolarizedQpus) {
    Scenario s = analytic_c3(1000000, 5);
    s.qpus = three_qpus(1.0);
    RunReport r = run_scenario(s);
    for (const auto &rec : r.edges) {
        EXPECT_NEAR(rec.prepared_overlap, 0.5, 1e-12);
        EXPECT_NEAR(rec.estimate.mean, 0.5, 0.005);
    }
    EXPECT_EQ(r.verdict.kind, VerdictKind::none);

    Scenario two = stabilizer_c3(100000, 6);
    two.n = 2;
    two.qpus = {{"A", 5, 1.0}};
    two.assignment = Assignment::single("A");
    RunReport r2 = run_scenario(two);
    for (const auto &rec : r2.edges) EXPECT_NEAR(rec.prepared_overlap, 0.25, 1e-12);
    EXPECT_EQ(r2.verdict.kind, VerdictKind::none);
}

TEST(RunScenarioTest, RefereeStatesIgnoreQpuNoise) {
    Scenario s = analytic_c3(1000000, 8);
    s.qpus = three_qpus(1.0);
    s.state_source = StateSource::referee;
    s.source_nu = 0.0;
    RunReport r = run_scenario(s);
    EXPECT_EQ(r.state_source, StateSource::referee);
    EXPECT_EQ(r.verdict.kind, VerdictKind::set_magic);
}

TEST(RunScenarioTest, Deterministic) {
    Scenario s = analytic_c3(5000, 99);
    EXPECT_EQ(to_json(run_scenario(s)).dump(), to_json(run_scenario(s)).dump());
    Scenario other = s;
    other.master_seed = 100;
    EXPECT_NE(to_json(run_scenario(s)).dump(), to_json(run_scenario(other)).dump());
}

TEST(RunScenarioTest, AssignmentDoesNotChangeSamples) {
    Scenario rr = analytic_c3(5000, 3);
    Scenario single = rr;
    single.assignment = Assignment::single("B");
    RunReport a = run_scenario(rr), b = run_scenario(single);
    ASSERT_EQ(a.edges.size(), b.edges.size());
    for (size_t k = 0; k < a.edges.size(); ++k) {
        EXPECT_EQ(a.edges[k].zeros, b.edges[k].zeros);
        EXPECT_EQ(b.edges[k].qpu, "B");
    }
}

TEST(RunScenarioTest, ThreadCountDoesNotChangeReport) {
    Scenario s = analytic_c3(5000, 12);
    s.functional = cm_functional(7);
    s.functional_spec = "c7";
    auto sol = analytic_cycle_states(7);
    s.vertices.clear();
    for (int v = 1; v <= 7; ++v) {
        s.vertices[v] = StateLabel::explicit_state(sol.states[static_cast<size_t>(v - 1)].amplitudes());
    }
    setenv("MAGIC_CERT_THREADS", "1", 1);
    const std::string one = to_json(run_scenario(s)).dump();
    setenv("MAGIC_CERT_THREADS", "4", 1);
    const std::string four = to_json(run_scenario(s)).dump();
    unsetenv("MAGIC_CERT_THREADS");
    EXPECT_EQ(one, four);
}

TEST(RunScenarioTest, CoverageOfHalfWidth) {
    // One edge, 500 independent seeds, 10^3 shots, per-edge delta 0.05.
    const State a = named_state(K::zero, 1), b = named_state(K::plus, 1);
    const double truth = 0.5;
    const double ci = hoeffding_halfwidth(1000, 0.05);
    int covered = 0;
    for (uint64_t rep = 0; rep < 500; ++rep) {
        std::mt19937_64 stream(detail::derive_seed(77, rep));
        covered += std::abs(swap_test_sample(a, b, 1000, stream).estimate - truth) <= ci;
    }
    EXPECT_GE(covered, 475);
}

TEST(RunScenarioTest, WorkloadAccounting) {
    Scenario s = analytic_c3(1000, 1);
    s.functional = cm_functional(5);
    s.functional_spec = "c5";
    for (int v = 4; v <= 5; ++v) s.vertices[v] = StateLabel::named(K::plus);
    RunReport r = run_scenario(s);
    size_t total = 0, lo = 100, hi = 0;
    for (const auto &w : r.workload) {
        total += w.edges.size();
        lo = std::min(lo, w.edges.size());
        hi = std::max(hi, w.edges.size());
        EXPECT_EQ(w.total_shots, w.edges.size() * 1000u);
    }
    EXPECT_EQ(total, 5u);
    EXPECT_LE(hi - lo, 1u);
}

TEST(RunScenarioTest, FullSetMagicScenario) {
    Scenario s = analytic_c3(1000000, 4);
    s.full_set_magic = true;
    RunReport r = run_scenario(s);
    // Margin 1.25 - 1.2071 is far wider than the 10^6-shot half-width sum.
    EXPECT_EQ(r.verdict.kind, VerdictKind::full_set_magic);
    Scenario bad = s;
    bad.n = 2;
    bad.qpus = {{"A", 5, 0.0}};
    bad.assignment = Assignment::single("A");
    bad.vertices = {{1, StateLabel::named(K::zero)}, {2, StateLabel::named(K::plus)}, {3, StateLabel::named(K::one)}};
    EXPECT_THROW(run_scenario(bad), ScenarioError);
}

TEST(ValidateTest, EnumeratesProblemsBeforeSampling) {
    Scenario s = analytic_c3(0, 1);
    s.delta = 1.5;
    s.vertices.erase(2);
    s.qpus.push_back({"A", 3, 0.0});
    auto problems = validate_scenario(s);
    auto has = [&](const std::string &p) {
        return std::any_of(problems.begin(), problems.end(), [&](const std::string &x) { return x.rfind(p, 0) == 0; });
    };
    EXPECT_TRUE(has("$.shots_per_edge"));
    EXPECT_TRUE(has("$.delta"));
    EXPECT_TRUE(has("$.vertices.2"));
    EXPECT_TRUE(has("$.qpus[3].id"));
    EXPECT_THROW(run_scenario(s), ScenarioError);

    Scenario h5 = analytic_c3(100, 1);
    h5.functional = hm_functional(5);
    EXPECT_FALSE(validate_scenario(h5).empty());

    Scenario cap = analytic_c3(100, 1);
    cap.qpus = {{"A", 2, 0.0}, {"B", 3, 0.0}};
    auto cp = validate_scenario(cap);
    ASSERT_EQ(cp.size(), 1u);
    EXPECT_EQ(cp[0].rfind("$.assignment", 0), 0u);
}

nlohmann::json scenario_doc() {
    return nlohmann::json::parse(R"({
      "n": 1,
      "vertices": {"1": "zero", "2": {"computational": "1"}, "3": {"explicit": [[0.6, 0], [0, 0.8]]}},
      "functional": "c3",
      "qpus": [{"id": "A", "qubit_capacity": 3, "depolarizing_nu": 0.1}, {"id": "B", "qubit_capacity": 3}],
      "assignment": {"explicit": [{"edge": [1, 2], "qpu": "A"}, {"edge": [2, 3], "qpu": "B"}, {"edge": [1, 3], "qpu": "A"}]},
      "shots_per_edge": 2000,
      "delta": 0.05,
      "master_seed": 17
    })");
}

TEST(ScenarioJsonTest, ParsesAllLabelForms) {
    Scenario s = scenario_from_json(scenario_doc());
    EXPECT_EQ(s.n, 1);
    EXPECT_EQ(s.vertices.at(1).kind, K::zero);
    EXPECT_EQ(s.vertices.at(2).kind, K::computational);
    EXPECT_EQ(s.vertices.at(3).kind, K::explicit_amplitudes);
    EXPECT_EQ(s.qpus[1].depolarizing_nu, 0.0);
    EXPECT_EQ(s.assignment.kind, Assignment::Kind::explicit_map);
    EXPECT_EQ(s.shots_per_edge, 2000u);
    EXPECT_EQ(s.master_seed, 17u);
    Scenario back = scenario_from_json(nlohmann::json::parse(to_json(s).dump()));
    EXPECT_EQ(to_json(back), to_json(s));
}

TEST(ScenarioJsonTest, InlineFunctional) {
    nlohmann::json doc = scenario_doc();
    doc["functional"] = to_json(cm_functional(3));
    Scenario s = scenario_from_json(doc);
    EXPECT_EQ(s.functional.coefficients, cm_functional(3).coefficients);
}

std::vector<std::string> problems_of(const nlohmann::json &doc) {
    try {
        scenario_from_json(doc);
    } catch (const ScenarioError &e) {
        return e.problems();
    }
    return {};
}

TEST(ScenarioJsonTest, StrictSchemaWithPaths) {
    nlohmann::json unknown = scenario_doc();
    unknown["comment"] = "hi";
    auto p1 = problems_of(unknown);
    ASSERT_FALSE(p1.empty());
    EXPECT_EQ(p1[0].rfind("$.comment", 0), 0u);

    nlohmann::json bad_cap = scenario_doc();
    bad_cap["qpus"][0]["qubit_capacity"] = "three";
    bad_cap["delta"] = "x";
    auto p2 = problems_of(bad_cap);
    ASSERT_EQ(p2.size(), 2u);

    nlohmann::json missing = scenario_doc();
    missing.erase("shots_per_edge");
    auto p3 = problems_of(missing);
    ASSERT_EQ(p3.size(), 1u);
    EXPECT_NE(p3[0].find("$.shots_per_edge"), std::string::npos);

    nlohmann::json bad_label = scenario_doc();
    bad_label["vertices"]["1"] = "magic";
    auto p4 = problems_of(bad_label);
    ASSERT_FALSE(p4.empty());
    EXPECT_EQ(p4[0].rfind("$.vertices.1", 0), 0u);

    nlohmann::json unnormalized = scenario_doc();
    unnormalized["vertices"]["3"] = {{"explicit", {{1.0, 0.0}, {1.0, 0.0}}}};
    EXPECT_FALSE(problems_of(unnormalized).empty());

    nlohmann::json bad_edge = scenario_doc();
    bad_edge["assignment"]["explicit"][0]["edge"] = {1};
    auto p5 = problems_of(bad_edge);
    ASSERT_FALSE(p5.empty());
    EXPECT_EQ(p5[0].rfind("$.assignment.explicit[0]", 0), 0u);

    EXPECT_FALSE(problems_of(nlohmann::json::array()).empty());
}

TEST(ReportJsonTest, RoundTrip) {
    RunReport r = run_scenario(scenario_from_json(scenario_doc()));
    r.timestamp = "2026-01-01T00:00:00Z";
    nlohmann::json j = to_json(r);
    RunReport back = run_report_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(j["meta"]["master_seed"], 17);
    EXPECT_EQ(j["verdict"]["protocol"], "hoeffding-union-bound");
}

TEST(ReportJsonTest, RejectsBrokenReports) {
    nlohmann::json j = to_json(run_scenario(scenario_from_json(scenario_doc())));
    nlohmann::json missing = j;
    missing.erase("verdict");
    EXPECT_THROW(run_report_from_json(missing), ScenarioError);
    nlohmann::json overlap_workload = j;
    overlap_workload["workload"][1]["edges"].push_back({1, 2});
    EXPECT_THROW(run_report_from_json(overlap_workload), ScenarioError);
    nlohmann::json bad_mean = j;
    bad_mean["estimates"][0]["mean"] = 2.0;
    EXPECT_THROW(run_report_from_json(bad_mean), ScenarioError);
    nlohmann::json extra = j;
    extra["verdict"]["note"] = 1;
    EXPECT_THROW(run_report_from_json(extra), ScenarioError);
}

TEST(ReportCsvTest, Layout) {
    RunReport r = run_scenario(scenario_from_json(scenario_doc()));
    std::ostringstream out;
    write_estimates_csv(out, r);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "edge_i,edge_j,mean,ci,shots,qpu");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("1,2,", 0), 0u);
    EXPECT_NE(line.find(",2000,A"), std::string::npos);
}

// Driven by the CLI tests: validates a report file written by `certify`.
TEST(CliReportTest, ReportFileValidates) {
    const char *path = std::getenv("MAGIC_CERT_REPORT");
    if (path == nullptr) {
        GTEST_SKIP() << "MAGIC_CERT_REPORT not set";
    }
    std::ifstream in(path);
    ASSERT_TRUE(in.good()) << path;
    nlohmann::json j = nlohmann::json::parse(in);
    RunReport r = run_report_from_json(j);
    EXPECT_EQ(to_json(r), j);
    EXPECT_FALSE(r.timestamp.empty());
}

}  // namespace
