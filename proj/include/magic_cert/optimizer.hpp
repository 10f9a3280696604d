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
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "magic_cert/event_graph.hpp"

namespace magic_cert {

struct SeesawConfig {
    size_t dim = 2;
    int restarts = 20;
    int max_sweeps = 500;
    double tol = 1e-10;
    uint64_t seed = 0;
    /// Called after every vertex update with (restart index, functional value).
    /// When set, restarts run sequentially.
    std::function<void(int, double)> on_update;
};

struct OptResult {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<PureState> states;
    int sweeps_used = 0;
    bool converged = false;
    /// Some free vertex had an all-zero effective operator and was left unchanged.
    bool zero_operator = false;
    int best_restart = -1;

    VertexLabeling labeling() const { return VertexLabeling(states); }
};

using FrozenStates = std::map<int, PureState>;

namespace detail {

struct Neighbor {
    size_t vertex;  // 0-based
    double coeff;
};

inline std::vector<std::vector<Neighbor>> functional_adjacency(const LinearFunctional &f) {
    std::vector<std::vector<Neighbor>> adj(static_cast<size_t>(f.graph.vertex_count()));
    for (size_t i : f.support()) {
        const Edge &e = f.graph.edge(i);
        adj[static_cast<size_t>(e.u - 1)].push_back({static_cast<size_t>(e.v - 1), f.coefficients[i]});
        adj[static_cast<size_t>(e.v - 1)].push_back({static_cast<size_t>(e.u - 1), f.coefficients[i]});
    }
    return adj;
}

inline double functional_value(const LinearFunctional &f, const std::vector<Vector> &psi) {
    double total = f.offset;
    for (size_t i : f.support()) {
        const Edge &e = f.graph.edge(i);
        total += f.coefficients[i] *
                 std::norm(psi[static_cast<size_t>(e.u - 1)].dot(psi[static_cast<size_t>(e.v - 1)]));
    }
    return total;
}

struct RestartOutcome {
    double value;
    std::vector<Vector> states;
    int sweeps;
    bool converged;
    bool zero_operator;
};

inline RestartOutcome seesaw_restart(const LinearFunctional &f, const SeesawConfig &config,
                                     const FrozenStates &frozen,
                                     const std::vector<std::vector<Neighbor>> &adj, int restart) {
    const size_t m = static_cast<size_t>(f.graph.vertex_count());
    const uint64_t restart_seed = derive_seed(config.seed, static_cast<uint64_t>(restart));
    std::vector<Vector> psi(m);
    std::vector<bool> is_free(m, true);
    for (size_t x = 0; x < m; ++x) {
        auto it = frozen.find(static_cast<int>(x + 1));
        if (it != frozen.end()) {
            psi[x] = it->second.amplitudes();
            is_free[x] = false;
        } else {
            psi[x] = random_pure(config.dim, derive_seed(restart_seed, x)).amplitudes();
        }
    }
    const auto d = static_cast<Eigen::Index>(config.dim);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(d);
    bool zero_operator = false;
    double value = functional_value(f, psi);
    int sweeps = 0;
    bool converged = false;
    while (sweeps < config.max_sweeps) {
        const double before = value;
        for (size_t x = 0; x < m; ++x) {
            if (!is_free[x]) {
                continue;
            }
            Matrix h = Matrix::Zero(d, d);
            for (const Neighbor &nb : adj[x]) {
                h.noalias() += nb.coeff * (psi[nb.vertex] * psi[nb.vertex].adjoint());
            }
            if (h.cwiseAbs().maxCoeff() < 1e-14) {
                zero_operator = true;
                continue;
            }
            solver.compute(h);
            const auto &evals = solver.eigenvalues();
            const double top = evals(d - 1);
            bool keep = false;
            if (d >= 2 && top - evals(d - 2) < 1e-12) {
                double current = (psi[x].adjoint() * h * psi[x])(0).real();
                keep = current >= top - 1e-12;
            }
            if (!keep) {
                psi[x] = solver.eigenvectors().col(d - 1);
            }
            value = functional_value(f, psi);
            if (config.on_update) {
                config.on_update(restart, value);
            }
        }
        ++sweeps;
        if (value - before < config.tol) {
            converged = true;
            break;
        }
    }
    return {value, std::move(psi), sweeps, converged, zero_operator};
}

}  // namespace detail

/// Coordinate ascent over pure states: each free vertex in turn is replaced by
/// the top eigenvector of its effective operator sum_v alpha_xv |psi_v><psi_v|.
/// Returns the best of config.restarts random initializations (ties go to the
/// lowest restart index).
inline OptResult seesaw_max(const LinearFunctional &f, const SeesawConfig &config,
                            const FrozenStates &frozen = {}) {
    detail::require(config.dim >= 2, "seesaw: dim must be >= 2");
    detail::require(config.restarts >= 1, "seesaw: restarts must be >= 1");
    detail::require(config.max_sweeps >= 1, "seesaw: max_sweeps must be >= 1");
    detail::require(config.tol > 0.0, "seesaw: tol must be > 0");
    for (const auto &[vertex, state] : frozen) {
        detail::require(vertex >= 1 && vertex <= f.graph.vertex_count(),
                        "seesaw: frozen vertex out of range");
        detail::require(state.dim() == config.dim, "seesaw: frozen state dimension mismatch");
    }
    const auto adj = detail::functional_adjacency(f);
    std::vector<std::optional<detail::RestartOutcome>> outcomes(static_cast<size_t>(config.restarts));
    auto run = [&](size_t r) {
        outcomes[r] = detail::seesaw_restart(f, config, frozen, adj, static_cast<int>(r));
    };
    if (config.on_update) {
        for (size_t r = 0; r < outcomes.size(); ++r) {
            run(r);
        }
    } else {
        detail::parallel_for(outcomes.size(), run);
    }
    OptResult best;
    for (size_t r = 0; r < outcomes.size(); ++r) {
        const auto &o = *outcomes[r];
        best.zero_operator = best.zero_operator || o.zero_operator;
        if (o.value > best.value) {
            best.value = o.value;
            best.sweeps_used = o.sweeps;
            best.converged = o.converged;
            best.best_restart = static_cast<int>(r);
            best.states.clear();
            for (const auto &v : o.states) {
                best.states.push_back(PureState::normalized(v));
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Closed-form qubit optimum of the cycle functionals.

struct AnalyticCycleSolution {
    int m = 0;
    std::vector<double> angles;
    std::vector<PureState> states;
    double value = 0.0;
};

/// (m-1) cos^2(pi/2m) - cos^2((1 - 1/m) pi/2).
inline double analytic_cycle_value(int m) {
    detail::require(m >= 3, "analytic cycle value needs m >= 3");
    const double pi = std::numbers::pi;
    const double a = std::cos(pi / (2.0 * m));
    const double b = std::cos((1.0 - 1.0 / m) * pi / 2.0);
    return (m - 1) * a * a - b * b;
}

/// |psi_x> = cos(theta_x)|0> + sin(theta_x)|1>, with
/// theta_x = pi/2 - (x-1)pi/2m for odd m and pi/2 + (x-1)pi/2m for even m.
inline AnalyticCycleSolution analytic_cycle_states(int m) {
    detail::require(m >= 3, "analytic cycle states need m >= 3");
    const double pi = std::numbers::pi;
    const double sign = (m % 2 == 1) ? -1.0 : 1.0;
    AnalyticCycleSolution sol;
    sol.m = m;
    for (int x = 1; x <= m; ++x) {
        double theta = pi / 2.0 + sign * (x - 1) * pi / (2.0 * m);
        sol.angles.push_back(theta);
        sol.states.push_back(PureState{std::cos(theta), std::sin(theta)});
    }
    sol.value = analytic_cycle_value(m);
    return sol;
}

/// Classical-to-quantum ratio (m-2) / analytic_cycle_value(m).
inline double ratio_cq(int m) { return (m - 2.0) / analytic_cycle_value(m); }

}  // namespace magic_cert
