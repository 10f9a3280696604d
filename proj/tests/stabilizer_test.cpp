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
#include <numbers>
#include <set>
#include <sstream>

#include "magic_cert/stabilizer.hpp"

namespace {

using namespace magic_cert;
using K = StateLabel::Kind;

uint64_t count_formula(int n) {
    uint64_t c = uint64_t{1} << n;
    for (int k = 1; k <= n; ++k) {
        c *= (uint64_t{1} << k) + 1;
    }
    return c;
}

const StabilizerSet &stab(int n) {
    static const StabilizerSet sets[3] = {enumerate_stabilizers(1), enumerate_stabilizers(2),
                                          enumerate_stabilizers(3)};
    return sets[n - 1];
}

TEST(EnumerateTest, CountsMatchFormula) {
    EXPECT_EQ(stab(1).size(), 6u);
    EXPECT_EQ(stab(2).size(), 60u);
    EXPECT_EQ(stab(3).size(), 1080u);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_EQ(stab(n).size(), count_formula(n));
        EXPECT_EQ(stabilizer_count(n), count_formula(n));
        EXPECT_EQ(stab(n).n(), n);
    }
}

TEST(EnumerateTest, RejectsOutOfRange) {
    EXPECT_THROW(enumerate_stabilizers(0), InvalidInput);
    EXPECT_THROW(enumerate_stabilizers(4), InvalidInput);
}

TEST(EnumerateTest, DeterministicOrderAndCanonicalStates) {
    StabilizerSet again = enumerate_stabilizers(2);
    ASSERT_EQ(again.size(), stab(2).size());
    for (size_t i = 0; i < again.size(); ++i) {
        EXPECT_EQ((again[i].amplitudes() - stab(2)[i].amplitudes()).norm(), 0.0);
        EXPECT_NEAR(again[i].amplitudes().norm(), 1.0, 1e-12);
    }
}

TEST(EnumerateTest, NoDuplicatesUpToPhase) {
    for (int n = 1; n <= 2; ++n) {
        const auto &set = stab(n);
        for (size_t i = 0; i < set.size(); ++i) {
            for (size_t j = i + 1; j < set.size(); ++j) {
                ASSERT_LT(overlap(set[i], set[j]), 1.0 - 1e-8) << "n=" << n << " " << i << "," << j;
            }
        }
    }
}

TEST(EnumerateTest, ClosedUnderGenerators) {
    for (int n = 1; n <= 3; ++n) {
        const auto &set = stab(n);
        std::set<detail::StateKey> keys;
        for (const auto &psi : set.states()) {
            keys.insert(detail::state_key(psi));
        }
        ASSERT_EQ(keys.size(), set.size());
        for (const auto &psi : set.states()) {
            for (const auto &image : clifford_generator_images(psi, n)) {
                ASSERT_TRUE(keys.count(detail::state_key(image))) << "n=" << n;
            }
        }
    }
    // Spot-check the key-based lookup against the tolerance-based one.
    for (const auto &psi : stab(2).states()) {
        for (const auto &image : clifford_generator_images(psi, 2)) {
            EXPECT_TRUE(stab(2).contains(image));
        }
    }
}

TEST(ContainsTest, Examples) {
    const auto &s1 = stab(1);
    EXPECT_TRUE(s1.contains(named_state(K::plus, 1)));
    EXPECT_TRUE(s1.contains(named_state(K::plus_i, 1)));
    EXPECT_FALSE(s1.contains(named_state(K::T, 1)));
    EXPECT_FALSE(s1.contains(named_state(K::F, 1)));
    Matrix t_dag = Matrix::Zero(2, 2);
    t_dag(0, 0) = 1.0;
    t_dag(1, 1) = std::polar(1.0, -std::numbers::pi / 4);
    EXPECT_TRUE(s1.contains(apply_unitary(t_dag, named_state(K::T, 1))));
    EXPECT_THROW(s1.contains(named_state(K::zero, 2)), InvalidInput);
    EXPECT_TRUE(stab(3).contains(named_state(K::GHZ, 3)));
    EXPECT_TRUE(stab(3).contains(PureState(named_state(K::zero, 3).amplitudes() * Complex(0, 1))));
}

TEST(OverlapClassTest, Examples) {
    auto a = is_valid_stabilizer_overlap(0.5, 1);
    EXPECT_TRUE(a.valid);
    EXPECT_EQ(a.k, 1);
    EXPECT_FALSE(is_valid_stabilizer_overlap(0.3, 2).valid);
    auto c = is_valid_stabilizer_overlap(0.125, 3);
    EXPECT_TRUE(c.valid);
    EXPECT_EQ(c.k, 3);
    EXPECT_FALSE(is_valid_stabilizer_overlap(0.125, 2).valid);
    auto z = is_valid_stabilizer_overlap(0.0, 2);
    EXPECT_TRUE(z.valid);
    EXPECT_FALSE(z.k.has_value());
    EXPECT_EQ(is_valid_stabilizer_overlap(1.0, 1).k, 0);
}

TEST(SpectrumTest, Examples) {
    auto s1 = overlap_spectrum(stab(1));
    ASSERT_EQ(s1.size(), 3u);
    EXPECT_NEAR(s1[0], 0.0, 1e-9);
    EXPECT_NEAR(s1[1], 0.5, 1e-9);
    EXPECT_NEAR(s1[2], 1.0, 1e-9);
    auto s2 = overlap_spectrum(stab(2));
    ASSERT_EQ(s2.size(), 4u);
    EXPECT_NEAR(s2[0], 0.0, 1e-9);
    EXPECT_NEAR(s2[1], 0.25, 1e-9);
    EXPECT_NEAR(s2[2], 0.5, 1e-9);
    EXPECT_NEAR(s2[3], 1.0, 1e-9);
    for (int n = 1; n <= 2; ++n) {
        for (double v : overlap_spectrum(stab(n))) {
            EXPECT_TRUE(is_valid_stabilizer_overlap(v, n).valid);
        }
    }
}

// Every pairwise overlap, computed from raw inner products, sits on the
// spectrum {0} u {2^-k : k <= n}.
TEST(SpectrumTest, AllPairsOnSpectrum) {
    for (int n = 1; n <= 3; ++n) {
        const auto &set = stab(n);
        size_t bad = 0;
        for (size_t i = 0; i < set.size(); ++i) {
            for (size_t j = i; j < set.size(); ++j) {
                const double x = std::norm(set[i].amplitudes().dot(set[j].amplitudes()));
                bool ok = x < 1e-9;
                for (int k = 0; k <= n && !ok; ++k) {
                    ok = std::abs(x - std::pow(2.0, -k)) < 1e-9;
                }
                bad += ok ? 0 : 1;
            }
        }
        EXPECT_EQ(bad, 0u) << "n=" << n;
    }
}

TEST(SpectrumTest, OverlapTableMatchesDirect) {
    const auto &set = stab(2);
    OverlapTable table(set);
    ASSERT_EQ(table.size(), 60u);
    for (size_t i = 0; i < set.size(); i += 7) {
        for (size_t j = 0; j < set.size(); ++j) {
            EXPECT_NEAR(table(i, j), overlap(set[i], set[j]), 1e-15);
        }
    }
}

// With psi_1 = |0^n>, r_12 = 2^-N2 and r_13 = 2^-N3, any nonzero r_23 is at
// least 2^-(N2+N3).
TEST(SpectrumTest, ChainedOverlapLowerBound) {
    for (int n = 1; n <= 2; ++n) {
        const auto &set = stab(n);
        const PureState &psi1 = set[set.zero_index()];
        size_t checked = 0;
        for (size_t a = 0; a < set.size(); ++a) {
            auto k2 = is_valid_stabilizer_overlap(overlap(psi1, set[a]), n).k;
            if (!k2) continue;
            for (size_t b = 0; b < set.size(); ++b) {
                auto k3 = is_valid_stabilizer_overlap(overlap(psi1, set[b]), n).k;
                if (!k3) continue;
                double r23 = overlap(set[a], set[b]);
                if (r23 < 1e-9) continue;
                EXPECT_GE(r23, std::pow(2.0, -(*k2 + *k3)) - 1e-9);
                ++checked;
            }
        }
        EXPECT_GT(checked, 0u);
    }
}

TEST(ExportTest, RoundTrip) {
    for (int n = 1; n <= 3; ++n) {
        std::stringstream buf;
        write_stabilizer_set(buf, stab(n));
        std::string header;
        std::getline(buf, header);
        EXPECT_EQ(header, "n=" + std::to_string(n) + " count=" + std::to_string(stab(n).size()));
        buf.seekg(0);
        StabilizerSet back = read_stabilizer_set(buf);
        ASSERT_EQ(back.size(), stab(n).size());
        EXPECT_EQ(back.n(), n);
        for (size_t i = 0; i < back.size(); ++i) {
            ASSERT_TRUE(equal_up_to_phase(back[i], stab(n)[i]));
        }
    }
}

TEST(ExportTest, RejectsMalformed) {
    std::stringstream bad_header("count=6\n");
    EXPECT_THROW(read_stabilizer_set(bad_header), InvalidInput);
    std::stringstream wrong_count("n=1 count=2\n1,0,0,0\n");
    EXPECT_THROW(read_stabilizer_set(wrong_count), InvalidInput);
    std::stringstream short_line("n=1 count=1\n1,0\n");
    EXPECT_THROW(read_stabilizer_set(short_line), InvalidInput);
}

}  // namespace
