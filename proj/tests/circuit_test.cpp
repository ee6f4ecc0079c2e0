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

#include "qprior/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "oracle.hpp"

using namespace qprior;

namespace {

int count_kind(const Circuit &c, GateKind kind) {
    int n = 0;
    for (const auto &g : c.gates) {
        n += g.kind == kind ? 1 : 0;
    }
    return n;
}

}  // namespace

TEST(DefaultCircuit, DepthOneHasExactlyOneEcrLayer) {
    const auto c = build_default_circuit(7, 1);
    EXPECT_EQ(two_qubit_depth(c), 1);
    EXPECT_EQ(count_kind(c, GateKind::ECR), 8);
    EXPECT_TRUE(is_fully_entangling(c));
    EXPECT_EQ(build_default_circuit(7, 1), c);
}

TEST(DefaultCircuit, ReachesRequestedTwoQubitDepth) {
    const auto c = build_default_circuit(7, 65);
    EXPECT_GE(two_qubit_depth(c), 65);
    EXPECT_EQ(c.n_qubits, 16);
    EXPECT_TRUE(is_fully_entangling(c));
    validate_circuit(c);
}

TEST(DefaultCircuit, UsesTheWholeGateSet) {
    const auto c = build_default_circuit(1, 4);
    for (auto kind : {GateKind::X, GateKind::SX, GateKind::RX, GateKind::RY, GateKind::RZ,
                      GateKind::ECR}) {
        EXPECT_GT(count_kind(c, kind), 0) << gate_name(kind);
    }
}

TEST(DefaultCircuit, SeedChangesAnglesOnly) {
    const auto a = build_default_circuit(7, 65);
    const auto b = build_default_circuit(8, 65);
    ASSERT_EQ(a.gates.size(), b.gates.size());
    int differing = 0;
    for (std::size_t i = 0; i < a.gates.size(); ++i) {
        EXPECT_EQ(a.gates[i].kind, b.gates[i].kind);
        EXPECT_EQ(a.gates[i].q0, b.gates[i].q0);
        EXPECT_EQ(a.gates[i].q1, b.gates[i].q1);
        if (a.gates[i].angle) {
            differing += *a.gates[i].angle != *b.gates[i].angle ? 1 : 0;
        }
    }
    EXPECT_GT(differing, 0);
}

TEST(DefaultCircuit, AnglesInRange) {
    for (const auto &g : build_default_circuit(99, 10).gates) {
        if (g.angle) {
            EXPECT_GE(*g.angle, 0.0);
            EXPECT_LT(*g.angle, 2 * std::numbers::pi);
        }
    }
}

TEST(DefaultCircuit, RejectsZeroDepth) {
    EXPECT_THROW(build_default_circuit(7, 0), InvalidArgument);
}

TEST(Gate, Validation) {
    EXPECT_NO_THROW(validate_gate(Gate::x(15), 16));
    EXPECT_THROW(validate_gate(Gate::x(16), 16), InvalidArgument);
    EXPECT_THROW(validate_gate(Gate::x(-1), 16), InvalidArgument);
    EXPECT_THROW(validate_gate(Gate::ecr(3, 3), 16), InvalidArgument);
    EXPECT_THROW(validate_gate(Gate::ecr(3, 16), 16), InvalidArgument);
    Gate bad = Gate::x(0);
    bad.angle = 1.0;
    EXPECT_THROW(validate_gate(bad, 16), InvalidArgument);
    Gate missing = Gate::rx(0, 1.0);
    missing.angle.reset();
    EXPECT_THROW(validate_gate(missing, 16), InvalidArgument);
}

TEST(TwoQubitDepth, CountsOverlapOnly) {
    Circuit c;
    c.n_qubits = 4;
    c.gates = {Gate::ecr(0, 1), Gate::ecr(2, 3), Gate::ecr(1, 2), Gate::x(0), Gate::ecr(0, 1)};
    EXPECT_EQ(two_qubit_depth(c), 3);
}

TEST(CircuitText, RoundTripIsBitExact) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = qprior::testing::random_circuit(16, 200, gen);
        c.angle_seed = gen();
        EXPECT_EQ(circuit_from_text(circuit_to_text(c)), c);
    }
    const auto d = build_default_circuit(7, 65);
    EXPECT_EQ(circuit_from_text(circuit_to_text(d)), d);
}

TEST(CircuitText, LineFormat) {
    Circuit c;
    c.n_qubits = 3;
    c.angle_seed = 9;
    c.gates = {Gate::sx(0), Gate::rz(2, 0.5), Gate::ecr(1, 0)};
    EXPECT_EQ(circuit_to_text(c),
              "qprior-circuit 1\nn_qubits 3\nangle_seed 9\nSX 0\nRZ 2,0.5\nECR 1,0\n");
}

TEST(CircuitText, RejectsMalformedInput) {
    EXPECT_THROW(circuit_from_text("n_qubits 16\nangle_seed 1\n"), FormatError);
    EXPECT_THROW(circuit_from_text("qprior-circuit 1\nn_qubits 16\n"), FormatError);
    EXPECT_THROW(circuit_from_text("qprior-circuit 1\nn_qubits 16\nangle_seed 1\nH 0\n"),
                 FormatError);
    EXPECT_THROW(circuit_from_text("qprior-circuit 1\nn_qubits 16\nangle_seed 1\nRX 0\n"),
                 FormatError);
    EXPECT_THROW(circuit_from_text("qprior-circuit 1\nn_qubits 16\nangle_seed 1\nX 0,1\n"),
                 FormatError);
    EXPECT_THROW(circuit_from_text("qprior-circuit 1\nn_qubits 16\nangle_seed 1\nX 16\n"),
                 InvalidArgument);
}

TEST(CircuitText, CommentsAndBlankLinesIgnored) {
    const auto c = circuit_from_text(
        "# generated\nqprior-circuit 1\n\nn_qubits 2\nangle_seed 3\n# body\nECR 0,1\n");
    ASSERT_EQ(c.gates.size(), 1U);
    EXPECT_EQ(c.gates[0], Gate::ecr(0, 1));
}

TEST(CircuitText, FileRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "qprior_circuit_test.txt").string();
    const auto c = build_default_circuit(3, 5);
    save_circuit(c, path);
    EXPECT_EQ(load_circuit(path), c);
    std::filesystem::remove(path);
}
