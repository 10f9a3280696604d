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

#include <cmath>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "magic_cert/event_graph.hpp"
#include "magic_cert/optimizer.hpp"
#include "magic_cert/stabilizer.hpp"
#include "magic_cert/witness.hpp"

namespace magic_cert {

// ---------------------------------------------------------------------------
// Brute-force stabilizer maxima.

inline constexpr double kExhaustiveTupleLimit = 1e8;

struct SearchMode {
    enum class Kind { exhaustive, sampled };
    Kind kind = Kind::exhaustive;
    uint64_t budget = 0;
    uint64_t seed = 0;
    /// Exhaustive only: pin vertex 1 to |0^n>. Valid because the Clifford group
    /// acts transitively on stabilizer states and preserves overlaps.
    bool fix_first_vertex = false;

    static SearchMode exhaustive(bool fix_first = false) {
        return {Kind::exhaustive, 0, 0, fix_first};
    }
    static SearchMode sampled(uint64_t budget, uint64_t seed) {
        return {Kind::sampled, budget, seed, false};
    }
};

struct BruteForceReport {
    std::string functional;
    int n = 0;
    SearchMode::Kind mode = SearchMode::Kind::exhaustive;
    bool symmetry_reduced = false;
    uint64_t tuples_checked = 0;
    double max_value = -std::numeric_limits<double>::infinity();
    std::vector<size_t> argmax;  // stabilizer-set index per vertex

    /// Exhaustive searches prove the bound at this n; sampled ones only fail to
    /// find a counterexample.
    std::string conclusion(double bound) const {
        bool within = max_value <= bound + 1e-9;
        if (mode == SearchMode::Kind::exhaustive) {
            return within ? "bound holds (exhaustive)" : "bound violated";
        }
        return within ? "no counterexample found" : "bound violated";
    }
};

namespace detail {

struct EdgeTerm {
    size_t u;
    size_t v;
    double coeff;
};

inline std::vector<EdgeTerm> edge_terms(const LinearFunctional &f) {
    std::vector<EdgeTerm> terms;
    for (size_t i : f.support()) {
        const Edge &e = f.graph.edge(i);
        terms.push_back({static_cast<size_t>(e.u - 1), static_cast<size_t>(e.v - 1), f.coefficients[i]});
    }
    return terms;
}

inline double tuple_value(const LinearFunctional &f, const std::vector<EdgeTerm> &terms,
                          const OverlapTable &table, const std::vector<size_t> &tuple) {
    double value = f.offset;
    for (const auto &t : terms) {
        value += t.coeff * table(tuple[t.u], tuple[t.v]);
    }
    return value;
}

struct SearchChunk {
    uint64_t checked = 0;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<size_t> argmax;
};

}  // namespace detail

/// Maximum of f over labelings by pure n-qubit stabilizer states.
inline BruteForceReport stabilizer_brute_max(const LinearFunctional &f, const StabilizerSet &set,
                                             const SearchMode &mode) {
    const size_t m = static_cast<size_t>(f.graph.vertex_count());
    const size_t count = set.size();
    const OverlapTable table(set);
    const auto terms = detail::edge_terms(f);

    BruteForceReport report;
    report.functional = f.name;
    report.n = set.n();
    report.mode = mode.kind;

    std::vector<detail::SearchChunk> chunks;
    if (mode.kind == SearchMode::Kind::exhaustive) {
        detail::require(std::pow(static_cast<double>(count), static_cast<double>(m)) <= kExhaustiveTupleLimit,
                        "exhaustive search exceeds 1e8 tuples; use sampled mode");
        report.symmetry_reduced = mode.fix_first_vertex;
        const size_t zero = set.zero_index();
        // One chunk per value of the first vertex; tuples are visited in
        // lexicographic order with vertex 1 most significant.
        const size_t first_values = mode.fix_first_vertex ? 1 : count;
        chunks.resize(first_values);
        detail::parallel_for(first_values, [&](size_t c) {
            auto &chunk = chunks[c];
            std::vector<size_t> tuple(m, 0);
            tuple[0] = mode.fix_first_vertex ? zero : c;
            while (true) {
                double value = detail::tuple_value(f, terms, table, tuple);
                ++chunk.checked;
                if (value > chunk.best) {
                    chunk.best = value;
                    chunk.argmax = tuple;
                }
                size_t pos = m - 1;
                while (pos >= 1 && ++tuple[pos] == count) {
                    tuple[pos] = 0;
                    --pos;
                }
                if (pos == 0) {
                    break;
                }
            }
        });
    } else {
        detail::require(mode.budget >= 1, "sampled search needs a positive budget");
        // Fixed chunking keeps the sampled tuples independent of worker count.
        constexpr uint64_t kChunks = 64;
        chunks.resize(kChunks);
        detail::parallel_for(kChunks, [&](size_t c) {
            auto &chunk = chunks[c];
            const uint64_t draws = mode.budget / kChunks + (c < mode.budget % kChunks ? 1 : 0);
            std::mt19937_64 rng(detail::derive_seed(mode.seed, c));
            std::uniform_int_distribution<size_t> pick(0, count - 1);
            std::vector<size_t> tuple(m);
            for (uint64_t k = 0; k < draws; ++k) {
                for (auto &t : tuple) {
                    t = pick(rng);
                }
                double value = detail::tuple_value(f, terms, table, tuple);
                ++chunk.checked;
                if (value > chunk.best) {
                    chunk.best = value;
                    chunk.argmax = tuple;
                }
            }
        });
    }
    for (const auto &chunk : chunks) {
        report.tuples_checked += chunk.checked;
        if (chunk.best > report.max_value) {
            report.max_value = chunk.best;
            report.argmax = chunk.argmax;
        }
    }
    return report;
}

inline BruteForceReport stabilizer_brute_max(const LinearFunctional &f, int n, const SearchMode &mode) {
    return stabilizer_brute_max(f, enumerate_stabilizers(n), mode);
}

inline nlohmann::json to_json(const BruteForceReport &r) {
    return {{"functional", r.functional},
            {"n", r.n},
            {"mode", r.mode == SearchMode::Kind::exhaustive ? "exhaustive" : "sampled"},
            {"symmetry_reduced", r.symmetry_reduced},
            {"tuples_checked", r.tuples_checked},
            {"max_value", r.max_value},
            {"argmax", r.argmax}};
}

// ---------------------------------------------------------------------------
// Full-set-magic bounds: c_m with |0> and |+> frozen at two cycle positions.

struct Table1Search {
    int m = 0;
    double value = -std::numeric_limits<double>::infinity();
    int zero_vertex = 0;
    int plus_vertex = 0;
    OptResult best;
};

inline constexpr int kTable1Restarts = 50;

/// Every ordered placement (i, j), i != j, of |0> at i and |+> at j is tried,
/// which covers the dihedral images and both assignments of the pair.
inline Table1Search table1_search(int m, int restarts = kTable1Restarts, uint64_t seed = 0) {
    detail::require(m >= 3 && m <= 9, "table1: m must lie in 3..9");
    detail::require(restarts >= 1, "table1: restarts must be >= 1");
    const LinearFunctional f = cm_functional(m);
    const PureState zero = named_state(StateLabel::Kind::zero, 1);
    const PureState plus = named_state(StateLabel::Kind::plus, 1);
    Table1Search out;
    out.m = m;
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= m; ++j) {
            if (i == j) {
                continue;
            }
            SeesawConfig config;
            config.dim = 2;
            config.restarts = restarts;
            config.seed = detail::derive_seed(seed, static_cast<uint64_t>(i), static_cast<uint64_t>(j));
            FrozenStates frozen;
            frozen.emplace(i, zero);
            frozen.emplace(j, plus);
            OptResult r = seesaw_max(f, config, frozen);
            if (r.value > out.value) {
                out.value = r.value;
                out.zero_vertex = i;
                out.plus_vertex = j;
                out.best = std::move(r);
            }
        }
    }
    return out;
}

inline double table1_bound(int m, int restarts = kTable1Restarts, uint64_t seed = 0) {
    return table1_search(m, restarts, seed).value;
}

struct Table1Row {
    int m;
    double constrained_max;
    double unconstrained_max;
};

inline std::vector<Table1Row> table1_rows(int m_max, int restarts = kTable1Restarts, uint64_t seed = 0) {
    detail::require(m_max >= 3 && m_max <= 9, "table1: m-max must lie in 3..9");
    std::vector<Table1Row> rows;
    for (int m = 3; m <= m_max; ++m) {
        rows.push_back({m, table1_bound(m, restarts, seed), analytic_cycle_value(m)});
    }
    return rows;
}

inline void write_table1_csv(std::ostream &out, const std::vector<Table1Row> &rows) {
    out << "m,constrained_max,unconstrained_max\n";
    out << std::setprecision(17);
    for (const auto &r : rows) {
        out << r.m << "," << r.constrained_max << "," << r.unconstrained_max << "\n";
    }
}

/// Thresholds regenerated by table1_bound for the requested odd m.
inline FullSetMagicThresholds full_set_magic_thresholds_from_oracle(const std::vector<int> &ms = {3, 5, 7, 9},
                                                                    int restarts = kTable1Restarts, uint64_t seed = 0) {
    FullSetMagicThresholds out;
    out.source = "oracle";
    for (int m : ms) {
        detail::require(m % 2 == 1, "full set magic thresholds exist only for odd m");
        out.by_m[m] = table1_bound(m, restarts, seed);
    }
    return out;
}

/// c_3 with two vertices drawn from the single-qubit stabilizer states (all 36
/// ordered pairs, every choice of the free vertex) and one free pure qubit.
inline double one_magic_c3_bound() {
    const LinearFunctional f = cm_functional(3);
    const StabilizerSet stab = enumerate_stabilizers(1);
    double best = -std::numeric_limits<double>::infinity();
    for (int free_vertex = 1; free_vertex <= 3; ++free_vertex) {
        int a = free_vertex == 1 ? 2 : 1;
        int b = free_vertex == 3 ? 2 : 3;
        for (size_t s = 0; s < stab.size(); ++s) {
            for (size_t t = 0; t < stab.size(); ++t) {
                SeesawConfig config;
                config.dim = 2;
                config.restarts = 2;
                FrozenStates frozen;
                frozen.emplace(a, stab[s]);
                frozen.emplace(b, stab[t]);
                best = std::max(best, seesaw_max(f, config, frozen).value);
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// GHZ realization of the 16-vertex suspension inequality.

inline constexpr double kMerminClaimedTotal = 4.0;

struct MerminReport {
    std::vector<std::string> labels;
    std::vector<double> overlaps;
    double total = 0.0;
    bool all_stabilizer = false;
    double claimed_total = kMerminClaimedTotal;
    bool agrees_with_claim = false;
    double classical_bound = 3.0;
};

inline const std::vector<std::string> &mermin_vertex_labels() {
    static const std::vector<std::string> labels = {
        "0++", "1-+", "1+-", "0--",  //
        "+0+", "-1+", "-0-", "+1-",  //
        "++0", "--0", "-+1", "+-1",  //
        "111", "001", "010", "100"};
    return labels;
}

/// Product state from a three-character label over {0,1,+,-}.
inline PureState product_state(const std::string &label) {
    detail::require(!label.empty(), "product state label is empty");
    auto factor = [](char c) {
        switch (c) {
            case '0': return named_state(StateLabel::Kind::zero, 1);
            case '1': return named_state(StateLabel::Kind::one, 1);
            case '+': return named_state(StateLabel::Kind::plus, 1);
            case '-': return named_state(StateLabel::Kind::minus, 1);
            default: throw InvalidInput(std::string("unknown product factor '") + c + "'");
        }
    };
    PureState out = factor(label[0]);
    for (size_t i = 1; i < label.size(); ++i) {
        out = tensor(out, factor(label[i]));
    }
    return out;
}

/// Reports the computed sum of |<GHZ|v>|^2 next to the claimed value; it does
/// not assume they agree.
inline MerminReport mermin_sum() {
    MerminReport report;
    const PureState ghz = named_state(StateLabel::Kind::GHZ, 3);
    const StabilizerSet stab = enumerate_stabilizers(3);
    report.all_stabilizer = true;
    for (const auto &label : mermin_vertex_labels()) {
        PureState v = product_state(label);
        report.labels.push_back(label);
        report.overlaps.push_back(overlap(ghz, v));
        report.total += report.overlaps.back();
        report.all_stabilizer = report.all_stabilizer && stab.contains(v);
    }
    report.agrees_with_claim = std::abs(report.total - report.claimed_total) < 1e-9;
    return report;
}

inline nlohmann::json to_json(const MerminReport &r) {
    nlohmann::json states = nlohmann::json::array();
    for (size_t i = 0; i < r.labels.size(); ++i) {
        states.push_back({{"state", r.labels[i]}, {"overlap", r.overlaps[i]}});
    }
    return {{"states", states},
            {"total", r.total},
            {"claimed_total", r.claimed_total},
            {"agrees_with_claim", r.agrees_with_claim},
            {"classical_bound", r.classical_bound},
            {"all_stabilizer", r.all_stabilizer}};
}

// ---------------------------------------------------------------------------
// Small closed-form checks.

/// Largest possible r_12 + r_13 + r_14 over distinct qudit stabilizer states.
inline double qudit_h4_positive_cap(int d) {
    detail::require(d >= 2, "qudit dimension must be >= 2");
    return 3.0 / d;
}

/// Mixed-state stabilizer 2-Renyi entropy of a qubit:
/// -log2( sum_{P in {1,X,Y,Z}} Tr(P rho)^4 / (2 Tr(rho^2)) ).
inline double renyi2_single_qubit(const DensityMatrix &rho) {
    detail::require(rho.dim() == 2, "renyi2_single_qubit: state must be a qubit");
    const Matrix &r = rho.entries();
    const double e1 = r.trace().real();
    const double ex = 2.0 * r(0, 1).real();
    const double ey = -2.0 * r(0, 1).imag();  // Tr(Y rho) = i(rho_01 - rho_10)
    const double ez = (r(0, 0) - r(1, 1)).real();
    const double moments = std::pow(e1, 4) + std::pow(ex, 4) + std::pow(ey, 4) + std::pow(ez, 4);
    return -std::log2(moments / (2.0 * rho.purity()));
}

/// T^dag maps {|0>, |T>} to {|0>, |+>}; true iff both images are stabilizer states.
inline bool t_pair_demo() {
    const StabilizerSet stab = enumerate_stabilizers(1);
    Matrix t_dag = Matrix::Zero(2, 2);
    t_dag(0, 0) = 1.0;
    t_dag(1, 1) = std::polar(1.0, -std::numbers::pi / 4.0);
    const PureState zero = apply_unitary(t_dag, named_state(StateLabel::Kind::zero, 1));
    const PureState t = apply_unitary(t_dag, named_state(StateLabel::Kind::T, 1));
    return stab.contains(zero) && stab.contains(t);
}

}  // namespace magic_cert
