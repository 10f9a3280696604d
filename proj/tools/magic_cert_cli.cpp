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

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "magic_cert/network.hpp"
#include "magic_cert/oracle.hpp"

using namespace magic_cert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot open output file '" + path + "'");
    }
    return out;
}

void write_json(const std::string &path, const nlohmann::json &j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

/// UTC stamp; SOURCE_DATE_EPOCH pins it for reproducible files.
std::string utc_timestamp() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char *epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

LinearFunctional cli_functional(const std::string &name) {
    LinearFunctional f = functional_by_name(name);
    const int m = f.graph.vertex_count();
    if (name[0] == 'c') {
        detail::require(m <= 20, "cycle functionals are available for c3..c20");
    } else {
        detail::require(m <= 8, "h functionals are available for h3..h8");
    }
    return f;
}

int cmd_enumerate(int n, const std::string &out_path) {
    if (n > 3) {
        throw InvalidInput("n must be ≤ 3");
    }
    if (n < 1) {
        throw InvalidInput("n must be ≥ 1");
    }
    StabilizerSet set = enumerate_stabilizers(n);
    std::cout << set.size() << " states\n";
    if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_stabilizer_set(out, set);
    }
    return kExitOk;
}

int cmd_bound(const std::string &name, const std::string &method, size_t dim, uint64_t seed, int restarts) {
    LinearFunctional f = cli_functional(name);
    if (method == "classical") {
        if (f.graph.vertex_count() <= kMaxIncoherentVertices) {
            std::cout << fmt6(classical_max(f)) << "\n";
        } else {
            std::cout << fmt6(f.classical_bound) << " (declared; vertex enumeration limited to 12 vertices)\n";
        }
    } else if (method == "analytic") {
        detail::require(name[0] == 'c', "analytic bound exists only for cycle functionals");
        std::cout << fmt6(analytic_cycle_value(f.graph.vertex_count())) << "\n";
    } else if (method == "seesaw") {
        SeesawConfig config;
        config.dim = dim;
        config.seed = seed;
        config.restarts = restarts;
        OptResult r = seesaw_max(f, config);
        std::cout << fmt6(r.value) << " (sweeps " << r.sweeps_used << ", restarts " << restarts << ", dim " << dim
                  << (r.converged ? "" : ", not converged") << ")\n";
    } else {
        throw InvalidInput("unknown method '" + method + "' (classical, analytic, seesaw)");
    }
    return kExitOk;
}

int cmd_oracle(const std::string &name, int n, const std::string &mode, uint64_t budget, uint64_t seed,
               bool fix_first, const std::string &out_path) {
    LinearFunctional f = functional_by_name(name);
    detail::require(n >= 1 && n <= 3, "n must lie in 1..3");
    detail::require(mode == "exhaustive" || mode == "sampled", "mode must be exhaustive or sampled");
    SearchMode search = mode == "exhaustive" ? SearchMode::exhaustive(fix_first) : SearchMode::sampled(budget, seed);
    BruteForceReport report = stabilizer_brute_max(f, n, search);
    std::cout << f.name << " n=" << n << " " << mode << ": max " << fmt6(report.max_value) << " over "
              << report.tuples_checked << " tuples; bound " << fmt6(f.classical_bound) << ": "
              << report.conclusion(f.classical_bound) << "\n";
    if (!out_path.empty()) {
        nlohmann::json j = to_json(report);
        j["classical_bound"] = f.classical_bound;
        j["conclusion"] = report.conclusion(f.classical_bound);
        write_json(out_path, j);
    }
    return kExitOk;
}

int cmd_certify(const std::string &scenario_path, const std::string &out_path, const std::string &csv_path) {
    std::ifstream in(scenario_path);
    if (!in) {
        throw InvalidInput("cannot open scenario file '" + scenario_path + "'");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw InvalidInput(std::string("$: malformed JSON: ") + e.what());
    }
    Scenario scenario = scenario_from_json(doc);
    RunReport report = run_scenario(scenario);
    report.timestamp = utc_timestamp();
    write_json(out_path, to_json(report));
    if (!csv_path.empty()) {
        auto csv = open_out(csv_path);
        write_estimates_csv(csv, report);
    }
    std::cout << verdict_line(report.verdict) << "\n";
    return kExitOk;
}

int cmd_table1(int m_max, const std::string &out_path, int restarts, uint64_t seed) {
    detail::require(m_max >= 3 && m_max <= 9, "m-max must lie in 3..9");
    auto rows = table1_rows(m_max, restarts, seed);
    for (const auto &r : rows) {
        std::cout << "m=" << r.m << " constrained " << fmt6(r.constrained_max) << " unconstrained "
                  << fmt6(r.unconstrained_max) << "\n";
    }
    auto out = open_out(out_path);
    write_table1_csv(out, rows);
    return kExitOk;
}

int cmd_mermin(const std::string &out_path) {
    MerminReport r = mermin_sum();
    for (size_t i = 0; i < r.labels.size(); ++i) {
        std::cout << "|" << r.labels[i] << ">  " << fmt6(r.overlaps[i]) << "\n";
    }
    std::cout << "total " << fmt6(r.total) << " (claimed " << fmt6(r.claimed_total) << ", classical bound "
              << fmt6(r.classical_bound) << "): " << (r.agrees_with_claim ? "agrees" : "DISCREPANCY") << "\n";
    std::cout << "all listed states are stabilizer states: " << (r.all_stabilizer ? "yes" : "no") << "\n";
    if (!out_path.empty()) {
        write_json(out_path, to_json(r));
    }
    return kExitOk;
}

int cmd_export(const std::string &name, const std::string &out_path) {
    LinearFunctional f = functional_by_name(name);
    write_json(out_path, to_json(f));
    std::cout << "wrote " << f.name << " to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Nonstabilizerness certification from two-state overlaps"};
    app.require_subcommand(1);

    int enum_n = 0;
    std::string enum_out;
    auto *enumerate = app.add_subcommand("enumerate", "Enumerate pure n-qubit stabilizer states");
    enumerate->add_option("--n", enum_n, "Qubit count (1..3)")->required();
    enumerate->add_option("--out", enum_out, "Write the states to this file");

    std::string bound_functional, bound_method;
    size_t bound_dim = 2;
    uint64_t bound_seed = 0;
    int bound_restarts = 20;
    auto *bound = app.add_subcommand("bound", "Classical, analytic or seesaw bound of a functional");
    bound->add_option("--functional", bound_functional, "c3..c20 or h3..h8")->required();
    bound->add_option("--method", bound_method, "classical | analytic | seesaw")->required();
    bound->add_option("--dim", bound_dim, "Hilbert-space dimension for seesaw");
    bound->add_option("--seed", bound_seed, "Seesaw seed");
    bound->add_option("--restarts", bound_restarts, "Seesaw restarts");

    std::string oracle_functional, oracle_mode = "exhaustive", oracle_out;
    int oracle_n = 1;
    uint64_t oracle_budget = 1000000, oracle_seed = 0;
    bool oracle_fix_first = false;
    auto *oracle = app.add_subcommand("oracle", "Brute-force stabilizer maximum of a functional");
    oracle->add_option("--functional", oracle_functional, "c<m> or h<m>")->required();
    oracle->add_option("--n", oracle_n, "Qubit count (1..3)")->required();
    oracle->add_option("--mode", oracle_mode, "exhaustive | sampled");
    oracle->add_option("--budget", oracle_budget, "Sampled tuples");
    oracle->add_option("--seed", oracle_seed, "Sampling seed");
    oracle->add_flag("--fix-first", oracle_fix_first, "Pin vertex 1 to |0^n> (exhaustive)");
    oracle->add_option("--out", oracle_out, "Write the report as JSON");

    std::string certify_scenario, certify_out, certify_csv;
    auto *certify = app.add_subcommand("certify", "Run a simulated QPU network scenario");
    certify->add_option("--scenario", certify_scenario, "Scenario JSON")->required();
    certify->add_option("--out", certify_out, "Run report JSON")->required();
    certify->add_option("--csv", certify_csv, "Optional per-edge estimate CSV");

    int table_m_max = 9;
    std::string table_out;
    int table_restarts = kTable1Restarts;
    uint64_t table_seed = 0;
    auto *table1 = app.add_subcommand("table1", "Constrained and unconstrained cycle maxima");
    table1->add_option("--m-max", table_m_max, "Largest m (3..9)")->required();
    table1->add_option("--out", table_out, "CSV output")->required();
    table1->add_option("--restarts", table_restarts, "Seesaw restarts per placement");
    table1->add_option("--seed", table_seed, "Seesaw seed");

    std::string mermin_out;
    auto *mermin = app.add_subcommand("mermin", "GHZ overlaps with the 16 product stabilizer states");
    mermin->add_option("--out", mermin_out, "Write the report as JSON");

    std::string export_functional, export_out;
    auto *exportf = app.add_subcommand("export-functional", "Write a functional interchange document");
    exportf->add_option("--functional", export_functional, "c<m> or h<m>")->required();
    exportf->add_option("--out", export_out, "JSON output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*enumerate) return cmd_enumerate(enum_n, enum_out);
        if (*bound) return cmd_bound(bound_functional, bound_method, bound_dim, bound_seed, bound_restarts);
        if (*oracle)
            return cmd_oracle(oracle_functional, oracle_n, oracle_mode, oracle_budget, oracle_seed, oracle_fix_first,
                              oracle_out);
        if (*certify) return cmd_certify(certify_scenario, certify_out, certify_csv);
        if (*table1) return cmd_table1(table_m_max, table_out, table_restarts, table_seed);
        if (*mermin) return cmd_mermin(mermin_out);
        if (*exportf) return cmd_export(export_functional, export_out);
    } catch (const ScenarioError &e) {
        for (const auto &p : e.problems()) {
            std::cerr << "error: " << p << "\n";
        }
        return kExitInvalid;
    } catch (const InvalidInput &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
