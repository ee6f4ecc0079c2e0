// Copyright 2026 The qprior Authors
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

#include "qprior/statevector.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "oracle.hpp"
#include "qprior/simulator.hpp"

using namespace qprior;
namespace qt = qprior::testing;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const StateVector &s, const qt::CVector &v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        worst = std::max(worst, std::abs(s.amplitudes()[i] - v(static_cast<Eigen::Index>(i))));
    }
    return worst;
}

Circuit bell_circuit(int n_qubits) {
    Circuit c;
    c.n_qubits = n_qubits;
    c.gates = {Gate::ry(0, kPi / 2), Gate::ecr(0, 1), Gate::rx(1, kPi / 2)};
    return c;
}

}  // namespace

TEST(StateVector, StartsInZeroState) {
    StateVector s(3);
    EXPECT_EQ(s.size(), 8U);
    EXPECT_EQ(s.amplitudes()[0], Complex(1.0, 0.0));
    EXPECT_DOUBLE_EQ(s.norm_squared(), 1.0);
}

TEST(StateVector, XOnQubitZeroFlipsLowestBit) {
    StateVector s(16);
    apply_gate(s, Gate::x(0));
    const auto p = probabilities(s);
    EXPECT_DOUBLE_EQ(p[1], 1.0);
    EXPECT_DOUBLE_EQ(p[0], 0.0);
}

TEST(StateVector, XOnHighQubitUsesBitPosition) {
    StateVector s(16);
    apply_gate(s, Gate::x(15));
    EXPECT_DOUBLE_EQ(probabilities(s)[1U << 15], 1.0);
}

TEST(StateVector, RzIsPhaseOnly) {
    std::mt19937_64 gen(2);
    for (std::uint32_t basis = 0; basis < 8; ++basis) {
        StateVector s(3);
        for (int q = 0; q < 3; ++q) {
            if ((basis >> q) & 1U) {
                apply_gate(s, Gate::x(q));
            }
        }
        const auto before = probabilities(s);
        apply_gate(s, Gate::rz(static_cast<int>(basis % 3), 1.2345));
        const auto after = probabilities(s);
        for (std::size_t i = 0; i < before.size(); ++i) {
            EXPECT_NEAR(after[i], before[i], 1e-15);
        }
    }
}

TEST(StateVector, MatchesDenseOracleOnRandomSmallCircuits) {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> qubits(1, 3);
    std::uniform_int_distribution<int> length(1, 20);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = qt::random_circuit(qubits(gen), length(gen), gen);
        StateVector s(c.n_qubits);
        apply_circuit(s, c);
        EXPECT_LT(max_abs_diff(s, qt::oracle_state(c)), 1e-9) << circuit_to_text(c);
    }
}

TEST(StateVector, EveryPrefixMatchesOracle) {
    std::mt19937_64 gen(77);
    const auto c = qt::random_circuit(3, 20, gen);
    StateVector s(3);
    Circuit prefix;
    prefix.n_qubits = 3;
    for (const auto &g : c.gates) {
        apply_gate(s, g);
        prefix.gates.push_back(g);
        ASSERT_LT(max_abs_diff(s, qt::oracle_state(prefix)), 1e-9);
    }
}

TEST(StateVector, EcrMatchesPauliDefinitionBothOrientations) {
    for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{0, 2}, std::pair{2, 1}}) {
        const auto full = qt::full_gate_matrix(Gate::ecr(a, b), 3);
        for (int basis = 0; basis < 8; ++basis) {
            StateVector s(3);
            for (int q = 0; q < 3; ++q) {
                if ((basis >> q) & 1) {
                    apply_gate(s, Gate::x(q));
                }
            }
            apply_gate(s, Gate::ecr(a, b));
            qt::CVector expected = full.col(basis);
            EXPECT_LT(max_abs_diff(s, expected), 1e-12);
        }
    }
}

TEST(StateVector, NormPreservedAfterEveryGate) {
    const auto c = build_default_circuit(5, 20);
    StateVector s(16);
    for (const auto &g : c.gates) {
        apply_gate(s, g);
        ASSERT_NEAR(s.norm_squared(), 1.0, 1e-10);
    }
}

TEST(StateVector, RejectsOutOfRangeQubit) {
    StateVector s(3);
    EXPECT_THROW(apply_gate(s, Gate::x(3)), InvalidArgument);
    EXPECT_THROW(apply_gate(s, Gate::ecr(0, 5)), InvalidArgument);
    EXPECT_THROW(apply_gate(s, Gate::ecr(1, 1)), InvalidArgument);
}

TEST(Probabilities, ZeroState) {
    const auto p = probabilities(StateVector(16));
    ASSERT_EQ(p.size(), 65536U);
    EXPECT_EQ(p[0], 1.0);
    double rest = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        rest += p[i];
    }
    EXPECT_EQ(rest, 0.0);
}

TEST(Probabilities, BellPairThroughGateSet) {
    const auto c = bell_circuit(16);
    StateVector s(16);
    apply_circuit(s, c);
    const auto p = probabilities(s);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double expected = (i == 0 || i == 3) ? 0.5 : 0.0;
        ASSERT_NEAR(p[i], expected, 1e-12) << i;
    }
    // Same construction on two qubits against the dense oracle.
    const auto small = bell_circuit(2);
    const auto v = qt::oracle_state(small);
    EXPECT_NEAR(std::norm(v(0)), 0.5, 1e-12);
    EXPECT_NEAR(std::norm(v(3)), 0.5, 1e-12);
}

TEST(Probabilities, SxLayerGivesUniformDistribution) {
    Circuit c;
    c.n_qubits = 3;
    for (int q = 0; q < 3; ++q) {
        c.gates.push_back(Gate::sx(q));
    }
    const auto v = qt::oracle_state(c);
    StateVector s(3);
    apply_circuit(s, c);
    const auto p = probabilities(s);
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_NEAR(p[i], std::norm(v(static_cast<Eigen::Index>(i))), 1e-12);
        EXPECT_NEAR(p[i], 0.125, 1e-12);
    }
    StateVector big(16);
    for (int q = 0; q < 16; ++q) {
        apply_gate(big, Gate::sx(q));
    }
    const auto pb = probabilities(big);
    double total = 0.0;
    for (double x : pb) {
        ASSERT_NEAR(x, 1.0 / 65536.0, 1e-12);
        total += x;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(FusedTrajectory, MatchesGateByGateWithoutNoise) {
    const auto c = build_default_circuit(7, 12);
    StateVector naive(16);
    apply_circuit(naive, c);
    StateVector fused(16);
    run_trajectory(c, NoiseModel{}, 0, fused);
    double worst = 0.0;
    for (std::size_t i = 0; i < naive.size(); ++i) {
        worst = std::max(worst, std::abs(naive.amplitudes()[i] - fused.amplitudes()[i]));
    }
    EXPECT_LT(worst, 1e-9);
    EXPECT_NEAR(fused.norm_squared(), 1.0, 1e-10);
}

TEST(FusedTrajectory, MatchesOracleOnSmallRandomCircuits) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = qt::random_circuit(3, 20, gen);
        StateVector s(3);
        run_trajectory(c, NoiseModel{}, 0, s);
        EXPECT_LT(max_abs_diff(s, qt::oracle_state(c)), 1e-9);
    }
}

TEST(FusedTrajectory, NoisyTrajectoryStaysNormalized) {
    const auto c = build_default_circuit(7, 10);
    auto noise = NoiseModel::uniform(16, 0.05, 0.0, 0.0, 3);
    StateVector s(16);
    for (std::uint64_t t = 0; t < 4; ++t) {
        run_trajectory(c, noise, t, s);
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
    }
}
