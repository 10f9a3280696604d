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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string>
#include <variant>

#include "magic_cert/common.hpp"

namespace magic_cert {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kStateTolerance = 1e-9;
inline constexpr double kPhaseTolerance = 1e-8;

/// A normalized state vector. Amplitudes are stored as given; global phase is
/// only removed by canonical().
class PureState {
   public:
    explicit PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
        detail::require(amps_.size() >= 1, "pure state needs at least one amplitude");
        detail::require(std::abs(amps_.squaredNorm() - 1.0) < kStateTolerance,
                        "pure state amplitudes are not normalized");
    }

    PureState(std::initializer_list<Complex> amplitudes) : PureState(to_vector(amplitudes)) {}

    /// Normalizes arbitrary nonzero amplitudes.
    static PureState normalized(Vector amplitudes) {
        double norm = amplitudes.norm();
        detail::require(norm > 0.0, "cannot normalize a zero vector");
        return PureState(amplitudes / norm);
    }

    size_t dim() const { return static_cast<size_t>(amps_.size()); }
    const Vector &amplitudes() const { return amps_; }
    Complex operator[](size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

    Matrix projector() const { return amps_ * amps_.adjoint(); }

    /// First amplitude with magnitude above the phase tolerance made real-positive.
    PureState canonical() const {
        for (Eigen::Index i = 0; i < amps_.size(); ++i) {
            double mag = std::abs(amps_(i));
            if (mag > kPhaseTolerance) {
                Complex phase = std::conj(amps_(i)) / mag;
                return PureState(Unchecked{}, amps_ * phase);
            }
        }
        return *this;
    }

   private:
    struct Unchecked {};
    PureState(Unchecked, Vector amplitudes) : amps_(std::move(amplitudes)) {}

    static Vector to_vector(std::initializer_list<Complex> list) {
        Vector v(static_cast<Eigen::Index>(list.size()));
        Eigen::Index i = 0;
        for (const auto &a : list) {
            v(i++) = a;
        }
        return v;
    }

    Vector amps_;
};

/// Hermitian, unit-trace, positive semidefinite operator. Checked once here.
class DensityMatrix {
   public:
    explicit DensityMatrix(Matrix entries) : rho_(std::move(entries)) {
        detail::require(rho_.rows() >= 1 && rho_.rows() == rho_.cols(),
                        "density matrix must be square and nonempty");
        detail::require((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() < kStateTolerance,
                        "density matrix is not Hermitian");
        detail::require(std::abs(rho_.trace() - Complex(1.0)) < kStateTolerance,
                        "density matrix trace is not 1");
        Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
        detail::require(solver.eigenvalues().minCoeff() >= -kStateTolerance,
                        "density matrix is not positive semidefinite");
    }

    explicit DensityMatrix(const PureState &psi) : rho_(psi.projector()) {}

    static DensityMatrix maximally_mixed(size_t dim) {
        detail::require(dim >= 1, "dimension must be positive");
        auto d = static_cast<Eigen::Index>(dim);
        return DensityMatrix(Unchecked{}, Matrix::Identity(d, d) / static_cast<double>(dim));
    }

    size_t dim() const { return static_cast<size_t>(rho_.rows()); }
    const Matrix &entries() const { return rho_; }
    double purity() const { return (rho_ * rho_).trace().real(); }

   private:
    struct Unchecked {};
    DensityMatrix(Unchecked, Matrix entries) : rho_(std::move(entries)) {}

    friend DensityMatrix depolarize(const DensityMatrix &rho, double nu);
    friend DensityMatrix conjugate(const Matrix &unitary, const DensityMatrix &rho);

    Matrix rho_;
};

using State = std::variant<PureState, DensityMatrix>;

inline size_t dim_of(const State &s) {
    return std::visit([](const auto &x) { return x.dim(); }, s);
}

inline double overlap(const PureState &a, const PureState &b) {
    detail::require(a.dim() == b.dim(), "overlap: dimension mismatch");
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

inline double overlap(const PureState &a, const DensityMatrix &b) {
    detail::require(a.dim() == b.dim(), "overlap: dimension mismatch");
    return (a.amplitudes().adjoint() * b.entries() * a.amplitudes())(0).real();
}

inline double overlap(const DensityMatrix &a, const PureState &b) { return overlap(b, a); }

inline double overlap(const DensityMatrix &a, const DensityMatrix &b) {
    detail::require(a.dim() == b.dim(), "overlap: dimension mismatch");
    // Tr(AB) = sum_ij A_ij B_ji
    return (a.entries().cwiseProduct(b.entries().transpose())).sum().real();
}

inline double overlap(const State &a, const State &b) {
    return std::visit([](const auto &x, const auto &y) { return overlap(x, y); }, a, b);
}

inline DensityMatrix to_density(const State &s) {
    if (const auto *p = std::get_if<PureState>(&s)) {
        return DensityMatrix(*p);
    }
    return std::get<DensityMatrix>(s);
}

inline bool equal_up_to_phase(const PureState &a, const PureState &b,
                              double tol = kPhaseTolerance) {
    if (a.dim() != b.dim()) {
        return false;
    }
    const PureState x = a.canonical();
    const PureState y = b.canonical();
    return (x.amplitudes() - y.amplitudes()).cwiseAbs().maxCoeff() < tol;
}

/// Kronecker product; the left factor indexes the most significant position.
inline PureState tensor(const PureState &a, const PureState &b) {
    const auto da = static_cast<Eigen::Index>(a.dim());
    const auto db = static_cast<Eigen::Index>(b.dim());
    Vector out(da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        out.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
    }
    return PureState::normalized(std::move(out));
}

inline PureState apply_unitary(const Matrix &unitary, const PureState &psi) {
    detail::require(static_cast<size_t>(unitary.rows()) == psi.dim(), "apply_unitary: dimension mismatch");
    return PureState::normalized(unitary * psi.amplitudes());
}

inline DensityMatrix conjugate(const Matrix &unitary, const DensityMatrix &rho) {
    detail::require(static_cast<size_t>(unitary.rows()) == rho.dim(),
                    "conjugate: dimension mismatch");
    Matrix out = unitary * rho.entries() * unitary.adjoint();
    out = (out + out.adjoint()) / 2.0;
    return DensityMatrix(DensityMatrix::Unchecked{}, std::move(out));
}

inline DensityMatrix depolarize(const DensityMatrix &rho, double nu) {
    detail::require(nu >= 0.0 && nu <= 1.0, "depolarize: nu must lie in [0,1]");
    const auto d = static_cast<Eigen::Index>(rho.dim());
    Matrix out = (1.0 - nu) * rho.entries() +
                 (nu / static_cast<double>(d)) * Matrix::Identity(d, d);
    return DensityMatrix(DensityMatrix::Unchecked{}, std::move(out));
}

// ---------------------------------------------------------------------------
// Randomness. All generators are deterministic for a fixed seed.

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
inline PureState random_pure(size_t dim, uint64_t seed) {
    detail::require(dim >= 1, "random_pure: dim must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double re = gauss(rng);
        double im = gauss(rng);
        v(i) = Complex(re, im);
    }
    return PureState::normalized(std::move(v));
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with the
/// phases of R's diagonal absorbed.
inline Matrix random_unitary(size_t dim, uint64_t seed) {
    detail::require(dim >= 1, "random_unitary: dim must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        Complex diag = r(j, j);
        double mag = std::abs(diag);
        if (mag > 0.0) {
            q.col(j) *= diag / mag;
        }
    }
    return q;
}

/// Random full-rank mixed state G G^dag / Tr(G G^dag) with G Ginibre.
inline DensityMatrix random_density(size_t dim, uint64_t seed) {
    detail::require(dim >= 1, "random_density: dim must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (rho + rho.adjoint()) / 2.0;
    return DensityMatrix(std::move(rho));
}

// ---------------------------------------------------------------------------
// Named states.

struct StateLabel {
    enum class Kind { zero, plus, plus_i, one, minus, T, F, GHZ, computational, explicit_amplitudes };

    Kind kind = Kind::zero;
    std::string bits;  // computational only
    Vector amplitudes;  // explicit_amplitudes only

    static StateLabel named(Kind k) { return StateLabel{k, {}, {}}; }
    static StateLabel computational_basis(std::string bitstring) {
        return StateLabel{Kind::computational, std::move(bitstring), {}};
    }
    static StateLabel explicit_state(Vector amps) {
        return StateLabel{Kind::explicit_amplitudes, {}, std::move(amps)};
    }
};

inline const char *label_name(StateLabel::Kind k) {
    switch (k) {
        case StateLabel::Kind::zero: return "zero";
        case StateLabel::Kind::plus: return "plus";
        case StateLabel::Kind::plus_i: return "plus_i";
        case StateLabel::Kind::one: return "one";
        case StateLabel::Kind::minus: return "minus";
        case StateLabel::Kind::T: return "T";
        case StateLabel::Kind::F: return "F";
        case StateLabel::Kind::GHZ: return "GHZ";
        case StateLabel::Kind::computational: return "computational";
        case StateLabel::Kind::explicit_amplitudes: return "explicit";
    }
    return "?";
}

/// Parses the plain-name labels (everything except computational/explicit).
inline StateLabel parse_named_label(const std::string &name) {
    using K = StateLabel::Kind;
    for (K k : {K::zero, K::plus, K::plus_i, K::one, K::minus, K::T, K::F, K::GHZ}) {
        if (name == label_name(k)) {
            return StateLabel::named(k);
        }
    }
    throw InvalidInput("unknown state label '" + name + "'");
}

namespace detail {

inline PureState single_qubit(StateLabel::Kind k) {
    using K = StateLabel::Kind;
    const double s = 1.0 / std::numbers::sqrt2;
    switch (k) {
        case K::zero: return PureState{1.0, 0.0};
        case K::one: return PureState{0.0, 1.0};
        case K::plus: return PureState{s, s};
        case K::minus: return PureState{s, -s};
        case K::plus_i: return PureState{s, Complex(0.0, s)};
        case K::T: return PureState{s, std::polar(s, std::numbers::pi / 4.0)};
        case K::F: {
            // Bloch vector (1,1,1)/sqrt(3): polar angle acos(1/sqrt(3)), azimuth pi/4.
            double beta = std::acos(1.0 / std::sqrt(3.0));
            return PureState{std::cos(beta / 2.0),
                             std::polar(std::sin(beta / 2.0), std::numbers::pi / 4.0)};
        }
        default: break;
    }
    throw InvalidInput("not a single-qubit label");
}

}  // namespace detail

/// Single-qubit labels resolve to the n-fold tensor power.
inline PureState named_state(const StateLabel &label, int n) {
    using K = StateLabel::Kind;
    detail::require(n >= 1 && n <= 20, "named_state: qubit count out of range");
    const size_t dim = size_t{1} << n;
    switch (label.kind) {
        case K::GHZ: {
            detail::require(n == 3, "GHZ label requires n = 3");
            Vector v = Vector::Zero(8);
            v(0) = v(7) = 1.0 / std::numbers::sqrt2;
            return PureState(std::move(v));
        }
        case K::computational: {
            detail::require(label.bits.size() == static_cast<size_t>(n),
                            "computational label length must equal n");
            size_t index = 0;
            for (char c : label.bits) {
                detail::require(c == '0' || c == '1', "computational label must be a bitstring");
                index = (index << 1) | static_cast<size_t>(c == '1');
            }
            Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
            v(static_cast<Eigen::Index>(index)) = 1.0;
            return PureState(std::move(v));
        }
        case K::explicit_amplitudes:
            detail::require(static_cast<size_t>(label.amplitudes.size()) == dim,
                            "explicit amplitudes must have length 2^n");
            return PureState(label.amplitudes);
        default: {
            PureState one = detail::single_qubit(label.kind);
            PureState out = one;
            for (int q = 1; q < n; ++q) {
                out = tensor(out, one);
            }
            return out;
        }
    }
}

inline PureState named_state(StateLabel::Kind kind, int n) {
    return named_state(StateLabel::named(kind), n);
}

}  // namespace magic_cert
