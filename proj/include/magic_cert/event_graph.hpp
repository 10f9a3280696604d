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

#include <algorithm>
#include <compare>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "magic_cert/states.hpp"

namespace magic_cert {

/// Unordered vertex pair, stored with u < v. Vertices are labeled 1..m.
struct Edge {
    int u = 0;
    int v = 0;

    Edge() = default;
    Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}

    auto operator<=>(const Edge &) const = default;

    std::string str() const { return "{" + std::to_string(u) + "," + std::to_string(v) + "}"; }
};

/// Simple connected graph. Edge order is part of the value: it fixes the
/// canonical edge index used by weights, coefficients, and seeded streams.
class EventGraph {
   public:
    EventGraph(int m, std::vector<Edge> edges) : m_(m), edges_(std::move(edges)) {
        detail::require(m_ >= 2, "event graph needs at least 2 vertices");
        std::set<Edge> unique;
        for (const Edge &e : edges_) {
            detail::require(e.u != e.v, "event graph: self-loop " + e.str());
            detail::require(e.u >= 1 && e.v <= m_, "event graph: vertex out of range in " + e.str());
            detail::require(unique.insert(e).second, "event graph: duplicate edge " + e.str());
        }
        detail::require(is_connected(), "event graph must be connected");
    }

    int vertex_count() const { return m_; }
    size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge> &edges() const { return edges_; }
    const Edge &edge(size_t i) const { return edges_[i]; }

    std::optional<size_t> edge_index(const Edge &e) const {
        auto it = std::find(edges_.begin(), edges_.end(), e);
        if (it == edges_.end()) {
            return std::nullopt;
        }
        return static_cast<size_t>(it - edges_.begin());
    }

    bool operator==(const EventGraph &) const = default;

   private:
    bool is_connected() const {
        std::vector<int> parent(static_cast<size_t>(m_ + 1));
        for (int i = 0; i <= m_; ++i) {
            parent[static_cast<size_t>(i)] = i;
        }
        auto find = [&](int x) {
            while (parent[static_cast<size_t>(x)] != x) {
                x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            }
            return x;
        };
        int components = m_;
        for (const Edge &e : edges_) {
            int a = find(e.u);
            int b = find(e.v);
            if (a != b) {
                parent[static_cast<size_t>(a)] = b;
                --components;
            }
        }
        return components == 1;
    }

    int m_;
    std::vector<Edge> edges_;
};

/// Edges {i,i+1} for i < m, then {1,m}.
inline EventGraph cycle_graph(int m) {
    detail::require(m >= 3, "cycle graph needs m >= 3");
    std::vector<Edge> edges;
    for (int i = 1; i < m; ++i) {
        edges.emplace_back(i, i + 1);
    }
    edges.emplace_back(1, m);
    return EventGraph(m, std::move(edges));
}

/// All pairs in lexicographic order.
inline EventGraph complete_graph(int m) {
    detail::require(m >= 3, "complete graph needs m >= 3");
    std::vector<Edge> edges;
    for (int i = 1; i <= m; ++i) {
        for (int j = i + 1; j <= m; ++j) {
            edges.emplace_back(i, j);
        }
    }
    return EventGraph(m, std::move(edges));
}

/// One weight per graph edge, aligned with graph.edges().
struct EdgeWeights {
    EventGraph graph;
    std::vector<double> weights;

    EdgeWeights(EventGraph g, std::vector<double> w) : graph(std::move(g)), weights(std::move(w)) {
        detail::require(weights.size() == graph.edge_count(), "edge weights: one weight per edge");
        for (double &x : weights) {
            detail::require(x >= -1e-9 && x <= 1.0 + 1e-9, "edge weights must lie in [0,1]");
            x = std::clamp(x, 0.0, 1.0);
        }
    }

    double at(const Edge &e) const {
        auto i = graph.edge_index(e);
        detail::require(i.has_value(), "edge " + e.str() + " not in graph");
        return weights[*i];
    }
};

/// f(r) = offset + sum_e coefficients[e] * r_e, with f <= classical_bound on
/// incoherent realizations. The offset is zero except for restricted functionals.
struct LinearFunctional {
    EventGraph graph;
    std::vector<double> coefficients;
    double classical_bound = 0.0;
    std::string name;
    double offset = 0.0;

    LinearFunctional(EventGraph g, std::vector<double> coeffs, double bound, std::string tag,
                     double constant = 0.0)
        : graph(std::move(g)),
          coefficients(std::move(coeffs)),
          classical_bound(bound),
          name(std::move(tag)),
          offset(constant) {
        detail::require(coefficients.size() == graph.edge_count(),
                        "functional: one coefficient per graph edge");
    }

    /// Edge indices with nonzero coefficient.
    std::vector<size_t> support() const {
        std::vector<size_t> out;
        for (size_t i = 0; i < coefficients.size(); ++i) {
            if (coefficients[i] != 0.0) {
                out.push_back(i);
            }
        }
        return out;
    }

    double coefficient(const Edge &e) const {
        auto i = graph.edge_index(e);
        return i ? coefficients[*i] : 0.0;
    }
};

/// Total assignment of states to vertices 1..m (stored at index vertex-1).
class VertexLabeling {
   public:
    VertexLabeling() = default;
    explicit VertexLabeling(std::vector<State> states) : states_(std::move(states)) {
        for (const auto &s : states_) {
            detail::require(dim_of(s) == dim_of(states_.front()),
                            "vertex labeling: all states must share one dimension");
        }
    }
    explicit VertexLabeling(const std::vector<PureState> &states)
        : VertexLabeling(std::vector<State>(states.begin(), states.end())) {}

    size_t size() const { return states_.size(); }
    size_t dim() const { return states_.empty() ? 0 : dim_of(states_.front()); }
    const State &at(int vertex) const { return states_.at(static_cast<size_t>(vertex - 1)); }
    const std::vector<State> &states() const { return states_; }

   private:
    std::vector<State> states_;
};

inline LinearFunctional cm_functional(int m) {
    EventGraph g = cycle_graph(m);
    std::vector<double> coeffs(g.edge_count(), 1.0);
    coeffs.back() = -1.0;  // edge {1,m}
    return LinearFunctional(std::move(g), std::move(coeffs), m - 2.0, "c" + std::to_string(m));
}

/// Built by the recursion h_m = h_{m-1} + r_{1m} - sum_{i=2}^{m-1} r_{im},
/// starting from h_3 = r_12 + r_13 - r_23.
inline LinearFunctional hm_functional(int m) {
    detail::require(m >= 3, "h_m needs m >= 3");
    EventGraph g = complete_graph(m);
    std::vector<double> coeffs(g.edge_count(), 0.0);
    auto add = [&](int a, int b, double c) { coeffs[*g.edge_index(Edge(a, b))] += c; };
    add(1, 2, 1.0);
    add(1, 3, 1.0);
    add(2, 3, -1.0);
    for (int k = 4; k <= m; ++k) {
        add(1, k, 1.0);
        for (int i = 2; i < k; ++i) {
            add(i, k, -1.0);
        }
    }
    return LinearFunctional(std::move(g), std::move(coeffs), 1.0, "h" + std::to_string(m));
}

/// Parses "c<m>" / "h<m>".
inline LinearFunctional functional_by_name(const std::string &name) {
    detail::require(name.size() >= 2 && (name[0] == 'c' || name[0] == 'h'),
                    "unknown functional '" + name + "' (expected c<m> or h<m>)");
    size_t used = 0;
    int m = 0;
    try {
        m = std::stoi(name.substr(1), &used);
    } catch (const std::exception &) {
        throw InvalidInput("unknown functional '" + name + "'");
    }
    detail::require(used == name.size() - 1, "unknown functional '" + name + "'");
    detail::require(m >= 3, "functional index must be >= 3");
    return name[0] == 'c' ? cm_functional(m) : hm_functional(m);
}

inline double evaluate(const LinearFunctional &f, const EdgeWeights &r) {
    detail::require(r.graph == f.graph, "evaluate: weights belong to a different graph");
    double total = f.offset;
    for (size_t i = 0; i < f.coefficients.size(); ++i) {
        total += f.coefficients[i] * r.weights[i];
    }
    return total;
}

inline EdgeWeights overlaps_from_labeling(const EventGraph &g, const VertexLabeling &l) {
    detail::require(l.size() == static_cast<size_t>(g.vertex_count()),
                    "labeling must assign a state to every vertex");
    std::vector<double> w;
    w.reserve(g.edge_count());
    for (const Edge &e : g.edges()) {
        w.push_back(overlap(l.at(e.u), l.at(e.v)));
    }
    return EdgeWeights(g, std::move(w));
}

inline double evaluate(const LinearFunctional &f, const VertexLabeling &l) {
    return evaluate(f, overlaps_from_labeling(f.graph, l));
}

// ---------------------------------------------------------------------------
// Incoherent polytope vertices.

inline constexpr int kMaxIncoherentVertices = 12;

/// One representative labeling (a restricted growth string: vertex -> block id)
/// per distinct 0/1 edge tuple, in order of first appearance.
inline std::vector<std::vector<int>> incoherent_labelings(const EventGraph &g) {
    const int m = g.vertex_count();
    detail::require(m <= kMaxIncoherentVertices, "incoherent vertices: too many vertices (max 12)");
    std::vector<std::vector<int>> out;
    std::set<std::vector<char>> seen;
    std::vector<int> label(static_cast<size_t>(m), 0);
    std::vector<int> prefix_max(static_cast<size_t>(m), 0);
    auto record = [&] {
        std::vector<char> tuple;
        tuple.reserve(g.edge_count());
        for (const Edge &e : g.edges()) {
            tuple.push_back(label[static_cast<size_t>(e.u - 1)] == label[static_cast<size_t>(e.v - 1)]);
        }
        if (seen.insert(std::move(tuple)).second) {
            out.push_back(label);
        }
    };
    // Iterative enumeration of restricted growth strings: label[0] = 0 and
    // label[i] <= 1 + max(label[0..i-1]).
    while (true) {
        record();
        int i = m - 1;
        while (i > 0 && label[static_cast<size_t>(i)] > prefix_max[static_cast<size_t>(i - 1)]) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++label[static_cast<size_t>(i)];
        prefix_max[static_cast<size_t>(i)] =
            std::max(prefix_max[static_cast<size_t>(i - 1)], label[static_cast<size_t>(i)]);
        for (int j = i + 1; j < m; ++j) {
            label[static_cast<size_t>(j)] = 0;
            prefix_max[static_cast<size_t>(j)] = prefix_max[static_cast<size_t>(i)];
        }
    }
    return out;
}

inline std::vector<EdgeWeights> incoherent_vertices(const EventGraph &g) {
    std::vector<EdgeWeights> out;
    for (const auto &label : incoherent_labelings(g)) {
        std::vector<double> w;
        for (const Edge &e : g.edges()) {
            w.push_back(label[static_cast<size_t>(e.u - 1)] == label[static_cast<size_t>(e.v - 1)] ? 1.0 : 0.0);
        }
        out.emplace_back(g, std::move(w));
    }
    return out;
}

/// Maximum of f over the incoherent vertices of its graph.
inline double classical_max(const LinearFunctional &f) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto &label : incoherent_labelings(f.graph)) {
        double value = f.offset;
        for (size_t i = 0; i < f.graph.edge_count(); ++i) {
            const Edge &e = f.graph.edge(i);
            if (label[static_cast<size_t>(e.u - 1)] == label[static_cast<size_t>(e.v - 1)]) {
                value += f.coefficients[i];
            }
        }
        best = std::max(best, value);
    }
    return best;
}

/// Substitutes r_e = 1 and contracts e. The larger endpoint is merged into the
/// smaller one and the remaining vertices are renumbered consecutively; the
/// coefficient of e moves into the offset.
inline LinearFunctional restrict_unit_edge(const LinearFunctional &f, const Edge &e) {
    auto idx = f.graph.edge_index(e);
    detail::require(idx.has_value(), "restrict: edge " + e.str() + " not in graph");
    detail::require(f.graph.vertex_count() >= 4, "restrict: needs m >= 4 (m = 3 contracts to a multigraph)");
    auto relabel = [&](int x) {
        if (x == e.v) {
            x = e.u;
        }
        return x > e.v ? x - 1 : x;
    };
    std::vector<Edge> edges;
    std::vector<double> coeffs;
    for (size_t i = 0; i < f.graph.edge_count(); ++i) {
        if (i == *idx) {
            continue;
        }
        Edge mapped(relabel(f.graph.edge(i).u), relabel(f.graph.edge(i).v));
        detail::require(std::find(edges.begin(), edges.end(), mapped) == edges.end(),
                        "restrict: contraction of " + e.str() + " creates a parallel edge");
        edges.push_back(mapped);
        coeffs.push_back(f.coefficients[i]);
    }
    EventGraph g(f.graph.vertex_count() - 1, std::move(edges));
    return LinearFunctional(std::move(g), std::move(coeffs), f.classical_bound,
                            f.name + "|" + e.str() + "=1", f.offset + f.coefficients[*idx]);
}

// ---------------------------------------------------------------------------
// Interchange document:
// {"m": int, "edges": [[i,j],...], "coeffs": [...], "classical_bound": x, "name": s}
// plus "offset" when nonzero.

inline nlohmann::json to_json(const LinearFunctional &f) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge &e : f.graph.edges()) {
        edges.push_back({e.u, e.v});
    }
    nlohmann::json j = {{"m", f.graph.vertex_count()},
                        {"edges", edges},
                        {"coeffs", f.coefficients},
                        {"classical_bound", f.classical_bound},
                        {"name", f.name}};
    if (f.offset != 0.0) {
        j["offset"] = f.offset;
    }
    return j;
}

inline LinearFunctional functional_from_json(const nlohmann::json &j, const std::string &path = "$") {
    detail::require(j.is_object(), path + ": functional document must be an object");
    for (const auto &[key, value] : j.items()) {
        detail::require(key == "m" || key == "edges" || key == "coeffs" || key == "classical_bound" ||
                            key == "name" || key == "offset",
                        path + "." + key + ": unknown field");
    }
    for (const char *key : {"m", "edges", "coeffs", "classical_bound", "name"}) {
        detail::require(j.contains(key), path + "." + key + ": missing field");
    }
    detail::require(j["m"].is_number_integer(), path + ".m: expected integer");
    detail::require(j["edges"].is_array(), path + ".edges: expected array");
    detail::require(j["coeffs"].is_array(), path + ".coeffs: expected array");
    detail::require(j["classical_bound"].is_number(), path + ".classical_bound: expected number");
    detail::require(j["name"].is_string(), path + ".name: expected string");
    std::vector<Edge> edges;
    for (size_t i = 0; i < j["edges"].size(); ++i) {
        const auto &e = j["edges"][i];
        detail::require(e.is_array() && e.size() == 2 && e[0].is_number_integer() &&
                            e[1].is_number_integer(),
                        path + ".edges[" + std::to_string(i) + "]: expected [i,j]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    std::vector<double> coeffs;
    for (size_t i = 0; i < j["coeffs"].size(); ++i) {
        detail::require(j["coeffs"][i].is_number(),
                        path + ".coeffs[" + std::to_string(i) + "]: expected number");
        coeffs.push_back(j["coeffs"][i].get<double>());
    }
    detail::require(coeffs.size() == edges.size(), path + ".coeffs: length must match edges");
    double offset = 0.0;
    if (j.contains("offset")) {
        detail::require(j["offset"].is_number(), path + ".offset: expected number");
        offset = j["offset"].get<double>();
    }
    EventGraph g(j["m"].get<int>(), std::move(edges));
    return LinearFunctional(std::move(g), std::move(coeffs), j["classical_bound"].get<double>(),
                            j["name"].get<std::string>(), offset);
}

}  // namespace magic_cert
