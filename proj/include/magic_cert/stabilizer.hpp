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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "magic_cert/states.hpp"

namespace magic_cert {

/// 2^n * prod_{k=1..n} (2^k + 1).
inline uint64_t stabilizer_count(int n) {
    uint64_t count = uint64_t{1} << n;
    for (int k = 1; k <= n; ++k) {
        count *= (uint64_t{1} << k) + 1;
    }
    return count;
}

/// All pure n-qubit stabilizer states, deduplicated up to global phase and
/// sorted lexicographically on their phase-canonical amplitudes.
class StabilizerSet {
   public:
    int n() const { return n_; }
    size_t size() const { return states_.size(); }
    const std::vector<PureState> &states() const { return states_; }
    const PureState &operator[](size_t i) const { return states_[i]; }

    std::optional<size_t> index_of(const PureState &psi) const {
        detail::require(psi.dim() == (size_t{1} << n_), "stabilizer lookup: dimension mismatch");
        for (size_t i = 0; i < states_.size(); ++i) {
            if (equal_up_to_phase(psi, states_[i])) {
                return i;
            }
        }
        return std::nullopt;
    }

    bool contains(const PureState &psi) const { return index_of(psi).has_value(); }

    /// Index of |0...0>.
    size_t zero_index() const { return *index_of(named_state(StateLabel::Kind::zero, n_)); }

    friend StabilizerSet enumerate_stabilizers(int n);
    friend StabilizerSet read_stabilizer_set(std::istream &in);

   private:
    int n_ = 0;
    std::vector<PureState> states_;
};

namespace detail {

using StateKey = std::vector<int64_t>;

inline StateKey state_key(const PureState &psi) {
    const PureState c = psi.canonical();
    StateKey key;
    key.reserve(2 * c.dim());
    for (size_t i = 0; i < c.dim(); ++i) {
        key.push_back(std::llround(c[i].real() * 1e6));
        key.push_back(std::llround(c[i].imag() * 1e6));
    }
    return key;
}

// Qubit q addresses bit (n-1-q): qubit 0 is the most significant factor.
inline Vector apply_h(const Vector &v, int n, int q) {
    Vector out = v;
    const Eigen::Index mask = Eigen::Index{1} << (n - 1 - q);
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if ((i & mask) == 0) {
            Complex a = v(i);
            Complex b = v(i | mask);
            out(i) = s * (a + b);
            out(i | mask) = s * (a - b);
        }
    }
    return out;
}

inline Vector apply_s(const Vector &v, int n, int q) {
    Vector out = v;
    const Eigen::Index mask = Eigen::Index{1} << (n - 1 - q);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i & mask) {
            out(i) *= Complex(0.0, 1.0);
        }
    }
    return out;
}

inline Vector apply_cnot(const Vector &v, int n, int control, int target) {
    Vector out = v;
    const Eigen::Index cmask = Eigen::Index{1} << (n - 1 - control);
    const Eigen::Index tmask = Eigen::Index{1} << (n - 1 - target);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i & cmask) {
            out(i) = v(i ^ tmask);
        }
    }
    return out;
}

}  // namespace detail

/// Images of psi under every generator: H and S on each qubit, CNOT on every
/// ordered pair.
inline std::vector<PureState> clifford_generator_images(const PureState &psi, int n) {
    std::vector<PureState> out;
    const Vector &v = psi.amplitudes();
    for (int q = 0; q < n; ++q) {
        out.push_back(PureState::normalized(detail::apply_h(v, n, q)));
        out.push_back(PureState::normalized(detail::apply_s(v, n, q)));
    }
    for (int c = 0; c < n; ++c) {
        for (int t = 0; t < n; ++t) {
            if (c != t) {
                out.push_back(PureState::normalized(detail::apply_cnot(v, n, c, t)));
            }
        }
    }
    return out;
}

/// Breadth-first closure of |0^n> under the Clifford generators.
inline StabilizerSet enumerate_stabilizers(int n) {
    detail::require(n >= 1, "n must be >= 1");
    detail::require(n <= 3, "n must be <= 3");
    std::map<detail::StateKey, PureState> seen;
    std::deque<PureState> frontier;
    PureState start = named_state(StateLabel::Kind::zero, n);
    seen.emplace(detail::state_key(start), start.canonical());
    frontier.push_back(start);
    while (!frontier.empty()) {
        PureState current = frontier.front();
        frontier.pop_front();
        for (auto &image : clifford_generator_images(current, n)) {
            auto key = detail::state_key(image);
            if (seen.find(key) == seen.end()) {
                seen.emplace(std::move(key), image.canonical());
                frontier.push_back(std::move(image));
            }
        }
    }
    StabilizerSet set;
    set.n_ = n;
    set.states_.reserve(seen.size());
    // std::map iteration order is lexicographic on the rounded canonical key.
    for (auto &[key, state] : seen) {
        set.states_.push_back(state);
    }
    return set;
}

/// Dense table of pairwise overlaps, used by the brute-force searches.
class OverlapTable {
   public:
    explicit OverlapTable(const StabilizerSet &set) : size_(set.size()), values_(size_ * size_) {
        for (size_t i = 0; i < size_; ++i) {
            for (size_t j = i; j < size_; ++j) {
                double r = overlap(set[i], set[j]);
                values_[i * size_ + j] = r;
                values_[j * size_ + i] = r;
            }
        }
    }

    size_t size() const { return size_; }
    double operator()(size_t i, size_t j) const { return values_[i * size_ + j]; }

   private:
    size_t size_;
    std::vector<double> values_;
};

struct OverlapClass {
    bool valid = false;
    std::optional<int> k;  // absent for orthogonal pairs
};

/// Classifies x against the stabilizer overlap spectrum {0} u {2^-k : k = 0..n}.
inline OverlapClass is_valid_stabilizer_overlap(double x, int n) {
    if (x < 1e-9) {
        return {true, std::nullopt};
    }
    for (int k = 0; k <= n; ++k) {
        if (std::abs(x - std::ldexp(1.0, -k)) < 1e-9) {
            return {true, k};
        }
    }
    return {false, std::nullopt};
}

/// Distinct pairwise overlap values (pairs i <= j), ascending, merged at 1e-9.
inline std::vector<double> overlap_spectrum(const StabilizerSet &set) {
    std::vector<double> values;
    for (size_t i = 0; i < set.size(); ++i) {
        for (size_t j = i; j < set.size(); ++j) {
            values.push_back(overlap(set[i], set[j]));
        }
    }
    std::sort(values.begin(), values.end());
    std::vector<double> distinct;
    for (double v : values) {
        if (distinct.empty() || v - distinct.back() > 1e-9) {
            distinct.push_back(v);
        }
    }
    return distinct;
}

// ---------------------------------------------------------------------------
// Text export: header "n=<n> count=<count>", then one state per line as
// comma-separated re,im pairs.

inline void write_stabilizer_set(std::ostream &out, const StabilizerSet &set) {
    out << "n=" << set.n() << " count=" << set.size() << "\n";
    std::ostringstream line;
    line << std::setprecision(17);
    for (const auto &psi : set.states()) {
        line.str("");
        for (size_t i = 0; i < psi.dim(); ++i) {
            if (i > 0) {
                line << ",";
            }
            line << psi[i].real() << "," << psi[i].imag();
        }
        out << line.str() << "\n";
    }
}

inline StabilizerSet read_stabilizer_set(std::istream &in) {
    std::string header;
    detail::require(static_cast<bool>(std::getline(in, header)), "stabilizer file: missing header");
    int n = 0;
    size_t count = 0;
    detail::require(std::sscanf(header.c_str(), "n=%d count=%zu", &n, &count) == 2,
                    "stabilizer file: malformed header");
    detail::require(n >= 1 && n <= 3, "stabilizer file: n must be in 1..3");
    StabilizerSet set;
    set.n_ = n;
    const size_t dim = size_t{1} << n;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> numbers;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            numbers.push_back(std::stod(cell));
        }
        detail::require(numbers.size() == 2 * dim, "stabilizer file: wrong amplitude count");
        Vector v(static_cast<Eigen::Index>(dim));
        for (size_t i = 0; i < dim; ++i) {
            v(static_cast<Eigen::Index>(i)) = Complex(numbers[2 * i], numbers[2 * i + 1]);
        }
        set.states_.emplace_back(std::move(v));
    }
    detail::require(set.states_.size() == count, "stabilizer file: count mismatch");
    return set;
}

}  // namespace magic_cert
