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
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "magic_cert/event_graph.hpp"

namespace magic_cert {

enum class EstimateMethod { exact, swap_test };

inline const char *method_name(EstimateMethod m) {
    return m == EstimateMethod::exact ? "exact" : "swap_test";
}

/// Overlap estimate for one edge. Exact estimates carry shots = 0 and a zero
/// half-width.
struct OverlapEstimate {
    Edge edge;
    double mean = 0.0;
    uint64_t shots = 0;
    double ci_halfwidth = 0.0;
    EstimateMethod method = EstimateMethod::exact;

    static OverlapEstimate exact(Edge e, double value) {
        return {e, std::clamp(value, 0.0, 1.0), 0, 0.0, EstimateMethod::exact};
    }
};

enum class VerdictKind { none, set_magic, full_set_magic };

inline const char *verdict_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::none: return "none";
        case VerdictKind::set_magic: return "set_magic";
        case VerdictKind::full_set_magic: return "full_set_magic";
    }
    return "?";
}

/// A verdict needs the conservative value to clear its threshold by this much,
/// so floating-point noise in exact overlaps cannot certify.
inline constexpr double kVerdictMargin = 1e-9;

/// Simultaneous-coverage scheme used for every finite-shot verdict.
inline constexpr const char *kConfidenceProtocol = "hoeffding-union-bound";

struct Verdict {
    VerdictKind kind = VerdictKind::none;
    std::string functional;
    double point_value = 0.0;
    double conservative_value = 0.0;
    double threshold = 0.0;
    double confidence = 0.0;
    std::vector<OverlapEstimate> edges;
};

/// Half-width of a two-sided Hoeffding interval for the SWAP-test estimator
/// 2 p - 1, whose range is 2: 2 sqrt(ln(2/delta) / (2 shots)).
inline double hoeffding_halfwidth(uint64_t shots, double delta) {
    detail::require(shots >= 1, "hoeffding: shots must be >= 1");
    detail::require(delta > 0.0 && delta < 1.0, "hoeffding: delta must lie in (0,1)");
    return 2.0 * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(shots)));
}

/// Exact estimates for the support of f under a labeling.
inline std::vector<OverlapEstimate> exact_estimates(const LinearFunctional &f, const VertexLabeling &l) {
    const EdgeWeights r = overlaps_from_labeling(f.graph, l);
    std::vector<OverlapEstimate> out;
    for (size_t i : f.support()) {
        out.push_back(OverlapEstimate::exact(f.graph.edge(i), r.weights[i]));
    }
    return out;
}

namespace detail {

/// Estimates indexed by edge position; rejects missing, extra, or repeated edges.
inline std::vector<const OverlapEstimate *> match_support(const LinearFunctional &f,
                                                          const std::vector<OverlapEstimate> &estimates) {
    std::vector<const OverlapEstimate *> slot(f.graph.edge_count(), nullptr);
    for (const auto &est : estimates) {
        auto i = f.graph.edge_index(est.edge);
        require(i.has_value() && f.coefficients[*i] != 0.0,
                "estimate for edge " + est.edge.str() + " is outside the functional support");
        require(slot[*i] == nullptr, "duplicate estimate for edge " + est.edge.str());
        require(est.mean >= 0.0 && est.mean <= 1.0, "estimate mean must lie in [0,1]");
        require(est.ci_halfwidth >= 0.0, "estimate half-width must be >= 0");
        slot[*i] = &est;
    }
    for (size_t i : f.support()) {
        require(slot[i] != nullptr, "missing estimate for edge " + f.graph.edge(i).str());
    }
    return slot;
}

}  // namespace detail

inline double point_value(const LinearFunctional &f, const std::vector<OverlapEstimate> &estimates) {
    auto slot = detail::match_support(f, estimates);
    double total = f.offset;
    for (size_t i : f.support()) {
        total += f.coefficients[i] * slot[i]->mean;
    }
    return total;
}

/// Worst case of f over the confidence box: each edge is moved against the
/// sign of its coefficient and clipped to [0,1] before weighting.
inline double conservative_value(const LinearFunctional &f, const std::vector<OverlapEstimate> &estimates) {
    auto slot = detail::match_support(f, estimates);
    double total = f.offset;
    for (size_t i : f.support()) {
        const double c = f.coefficients[i];
        const double sign = c > 0.0 ? 1.0 : -1.0;
        const double shifted = std::clamp(slot[i]->mean - sign * slot[i]->ci_halfwidth, 0.0, 1.0);
        total += c * shifted;
    }
    return total;
}

/// Threshold of a proven stabilizer witness: m - 2 for a cycle inequality
/// (any negated edge), 1 for h_4 (any choice of apex vertex). Empty otherwise.
inline std::optional<double> proven_witness_threshold(const LinearFunctional &f) {
    if (f.offset != 0.0 || f.support().size() != f.graph.edge_count()) {
        return std::nullopt;
    }
    const int m = f.graph.vertex_count();
    std::vector<int> degree(static_cast<size_t>(m + 1), 0);
    for (const Edge &e : f.graph.edges()) {
        ++degree[static_cast<size_t>(e.u)];
        ++degree[static_cast<size_t>(e.v)];
    }
    bool is_cycle = m >= 3 && f.graph.edge_count() == static_cast<size_t>(m);
    for (int v = 1; v <= m && is_cycle; ++v) {
        is_cycle = degree[static_cast<size_t>(v)] == 2;
    }
    if (is_cycle) {
        int negated = 0;
        for (double c : f.coefficients) {
            if (c == -1.0) {
                ++negated;
            } else if (c != 1.0) {
                return std::nullopt;
            }
        }
        if (negated == 1 && f.classical_bound == m - 2.0) {
            return m - 2.0;
        }
        return std::nullopt;
    }
    if (m == 4 && f.graph.edge_count() == 6 && f.classical_bound == 1.0) {
        for (int apex = 1; apex <= 4; ++apex) {
            bool matches = true;
            for (size_t i = 0; i < 6; ++i) {
                const Edge &e = f.graph.edge(i);
                double expected = (e.u == apex || e.v == apex) ? 1.0 : -1.0;
                matches = matches && f.coefficients[i] == expected;
            }
            if (matches) {
                return 1.0;
            }
        }
    }
    return std::nullopt;
}

/// set_magic iff the conservative value exceeds the classical bound by more
/// than kVerdictMargin. The caller builds the estimates with per-edge
/// delta = delta / |support|.
inline Verdict certify_set_magic(const LinearFunctional &f, const std::vector<OverlapEstimate> &estimates,
                                 double delta) {
    detail::require(delta > 0.0 && delta < 1.0, "certify: delta must lie in (0,1)");
    auto threshold = proven_witness_threshold(f);
    detail::require(threshold.has_value(),
                    "functional '" + f.name +
                        "' is not a proven stabilizer witness; only cycle inequalities and h4 can certify");
    Verdict v;
    v.functional = f.name;
    v.point_value = point_value(f, estimates);
    v.conservative_value = conservative_value(f, estimates);
    v.threshold = *threshold;
    v.confidence = 1.0 - delta;
    v.edges = estimates;
    v.kind = v.conservative_value > v.threshold + kVerdictMargin ? VerdictKind::set_magic : VerdictKind::none;
    return v;
}

/// Per-m thresholds for full set magic (odd m only). from_oracle() regenerates
/// them by constrained optimization; reference() holds the tabulated values.
struct FullSetMagicThresholds {
    std::map<int, double> by_m;
    std::string source;

    static FullSetMagicThresholds reference() {
        return {{{3, 1.2071}, {5, 3.5061}, {7, 5.6468}, {9, 7.7254}}, "reference-table"};
    }

    double at(int m) const {
        auto it = by_m.find(m);
        detail::require(it != by_m.end(), "no full-set-magic threshold for m = " + std::to_string(m));
        return it->second;
    }
};

inline Verdict certify_full_set_magic(int m, const std::vector<OverlapEstimate> &estimates, double delta,
                                      const FullSetMagicThresholds &thresholds, bool qubit_promise) {
    detail::require(m % 2 == 1,
                    "even cycles cannot witness full set magic: the constrained and unconstrained maxima coincide");
    detail::require(m >= 3 && m <= 9, "full set magic thresholds exist for m in {3,5,7,9}");
    detail::require(qubit_promise, "full set magic certification requires the single-qubit promise");
    Verdict v = certify_set_magic(cm_functional(m), estimates, delta);
    const double full = thresholds.at(m);
    if (v.kind == VerdictKind::set_magic && v.conservative_value > full + kVerdictMargin) {
        v.kind = VerdictKind::full_set_magic;
        v.threshold = full;
    }
    return v;
}

inline std::string verdict_line(const Verdict &v) {
    const char *label = v.kind == VerdictKind::none        ? "NONE"
                        : v.kind == VerdictKind::set_magic ? "SET-MAGIC"
                                                           : "FULL-SET-MAGIC";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s (conservative %.3f %s %.3f, conf %.2f)", label, v.conservative_value,
                  v.kind == VerdictKind::none ? "<=" : ">", v.threshold, v.confidence);
    return buf;
}

inline nlohmann::json to_json(const OverlapEstimate &e) {
    return {{"edge", {e.edge.u, e.edge.v}},
            {"mean", e.mean},
            {"shots", e.shots},
            {"ci", e.ci_halfwidth},
            {"method", method_name(e.method)}};
}

inline nlohmann::json to_json(const Verdict &v) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &e : v.edges) {
        edges.push_back(to_json(e));
    }
    return {{"kind", verdict_name(v.kind)},
            {"functional", v.functional},
            {"point", v.point_value},
            {"conservative", v.conservative_value},
            {"threshold", v.threshold},
            {"confidence", v.confidence},
            {"protocol", kConfidenceProtocol},
            {"edges", edges}};
}

}  // namespace magic_cert
