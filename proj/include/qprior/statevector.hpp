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

/**
 * @file
 * Dense statevector and gate kernels.
 *
 * Conventions:
 * - qubit q is bit q of the amplitude index (qubit 0 is least significant);
 * - X = [[0,1],[1,0]], SX = [[1+i,1-i],[1-i,1+i]]/2;
 * - RX(t) = exp(-i t X/2), RY(t) = exp(-i t Y/2), RZ(t) = exp(-i t Z/2);
 * - ECR(a,b) = (X_a - Y_a X_b)/sqrt(2), with a the first listed qubit.
 *
 * Two-qubit matrices act on the local index k = bit_a + 2 bit_b.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qprior/circuit.hpp"
#include "qprior/errors.hpp"

namespace qprior {

using Complex = std::complex<double>;
/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Mat2 = std::array<Complex, 4>;
/// Row-major 4x4 matrix on the local index bit_a + 2 bit_b.
using Mat4 = std::array<Complex, 16>;

/// Plain complex product; std::complex operator* carries NaN recovery that
/// dominates the kernels.
inline Complex cmul(const Complex &a, const Complex &b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

inline constexpr Mat2 kIdentity2{Complex{1, 0}, Complex{0, 0}, Complex{0, 0},
                                 Complex{1, 0}};

inline Mat2 matmul(const Mat2 &a, const Mat2 &b) noexcept {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Mat4 matmul(const Mat4 &a, const Mat4 &b) noexcept {
    Mat4 out{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            Complex acc{};
            for (int k = 0; k < 4; ++k) {
                acc += a[r * 4 + k] * b[k * 4 + c];
            }
            out[r * 4 + c] = acc;
        }
    }
    return out;
}

/// `on_a` acting on qubit a and `on_b` on qubit b, in local indexing.
inline Mat4 kron_local(const Mat2 &on_a, const Mat2 &on_b) noexcept {
    Mat4 out{};
    for (int br = 0; br < 2; ++br) {
        for (int ar = 0; ar < 2; ++ar) {
            for (int bc = 0; bc < 2; ++bc) {
                for (int ac = 0; ac < 2; ++ac) {
                    out[(ar + 2 * br) * 4 + (ac + 2 * bc)] =
                        on_a[ar * 2 + ac] * on_b[br * 2 + bc];
                }
            }
        }
    }
    return out;
}

inline Mat2 single_qubit_matrix(const Gate &gate) {
    switch (gate.kind) {
    case GateKind::X:
        return {0.0, 1.0, 1.0, 0.0};
    case GateKind::SX:
        return {Complex{0.5, 0.5}, Complex{0.5, -0.5}, Complex{0.5, -0.5},
                Complex{0.5, 0.5}};
    case GateKind::RX: {
        const double c = std::cos(*gate.angle / 2);
        const double s = std::sin(*gate.angle / 2);
        return {c, Complex{0, -s}, Complex{0, -s}, c};
    }
    case GateKind::RY: {
        const double c = std::cos(*gate.angle / 2);
        const double s = std::sin(*gate.angle / 2);
        return {c, -s, s, c};
    }
    case GateKind::RZ: {
        const double c = std::cos(*gate.angle / 2);
        const double s = std::sin(*gate.angle / 2);
        return {Complex{c, -s}, 0.0, 0.0, Complex{c, s}};
    }
    case GateKind::ECR:
        break;
    }
    throw InvalidArgument("single_qubit_matrix: ECR is a two-qubit gate");
}

inline Mat4 ecr_matrix() noexcept {
    const double h = 1.0 / std::numbers::sqrt2;
    const Complex o{h, 0};
    const Complex i{0, h};
    const Complex z{};
    return {z, o, z, i,   //
            o, z, -i, z,  //
            z, i, z, o,   //
            -i, z, o, z};
}

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline Mat2 pauli_matrix(Pauli p) noexcept {
    switch (p) {
    case Pauli::X:
        return {0.0, 1.0, 1.0, 0.0};
    case Pauli::Y:
        return {0.0, Complex{0, -1}, Complex{0, 1}, 0.0};
    case Pauli::Z:
        return {1.0, 0.0, 0.0, -1.0};
    case Pauli::I:
        break;
    }
    return kIdentity2;
}

class StateVector {
  public:
    explicit StateVector(int n_qubits = kDefaultQubits) : n_qubits_(n_qubits) {
        require(n_qubits >= 1 && n_qubits <= kMaxQubits,
                "StateVector: n_qubits must be in [1, 16]");
        amplitudes_.assign(std::size_t{1} << n_qubits, Complex{});
        amplitudes_[0] = 1.0;
    }

    void reset() {
        std::fill(amplitudes_.begin(), amplitudes_.end(), Complex{});
        amplitudes_[0] = 1.0;
    }

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amplitudes_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amplitudes_; }

    [[nodiscard]] double norm_squared() const noexcept {
        double total = 0.0;
        for (const auto &a : amplitudes_) {
            total += std::norm(a);
        }
        return total;
    }

    void apply(const Mat2 &m, int q) {
        check_qubit(q);
        const std::size_t stride = std::size_t{1} << q;
        const std::size_t n = amplitudes_.size();
        Complex *amp = amplitudes_.data();
        for (std::size_t block = 0; block < n; block += 2 * stride) {
            for (std::size_t i = block; i < block + stride; ++i) {
                const Complex a0 = amp[i];
                const Complex a1 = amp[i + stride];
                amp[i] = cmul(m[0], a0) + cmul(m[1], a1);
                amp[i + stride] = cmul(m[2], a0) + cmul(m[3], a1);
            }
        }
    }

    void apply(const Mat4 &m, int qa, int qb) {
        check_qubit(qa);
        check_qubit(qb);
        require(qa != qb, "two-qubit gate on identical qubits");
        const std::size_t ma = std::size_t{1} << qa;
        const std::size_t mb = std::size_t{1} << qb;
        const int lo = std::min(qa, qb);
        const int hi = std::max(qa, qb);
        const std::size_t quarter = amplitudes_.size() >> 2;
        Complex *amp = amplitudes_.data();
        for (std::size_t j = 0; j < quarter; ++j) {
            std::size_t i = insert_zero_bit(j, lo);
            i = insert_zero_bit(i, hi);
            const std::size_t idx[4] = {i, i | ma, i | mb, i | ma | mb};
            const Complex in[4] = {amp[idx[0]], amp[idx[1]], amp[idx[2]],
                                   amp[idx[3]]};
            for (int r = 0; r < 4; ++r) {
                amp[idx[r]] = cmul(m[r * 4 + 0], in[0]) + cmul(m[r * 4 + 1], in[1]) +
                              cmul(m[r * 4 + 2], in[2]) + cmul(m[r * 4 + 3], in[3]);
            }
        }
    }

  private:
    static std::size_t insert_zero_bit(std::size_t value, int bit) noexcept {
        const std::size_t low = value & ((std::size_t{1} << bit) - 1);
        return ((value >> bit) << (bit + 1)) | low;
    }

    void check_qubit(int q) const {
        if (q < 0 || q >= n_qubits_) {
            throw InvalidArgument("qubit index " + std::to_string(q) +
                                  " out of range for " +
                                  std::to_string(n_qubits_) + "-qubit state");
        }
    }

    int n_qubits_;
    std::vector<Complex> amplitudes_;
};

inline void apply_gate(StateVector &state, const Gate &gate) {
    validate_gate(gate, state.n_qubits());
    if (is_two_qubit(gate.kind)) {
        state.apply(ecr_matrix(), gate.q0, gate.q1);
    } else {
        state.apply(single_qubit_matrix(gate), gate.q0);
    }
}

/// Applies every gate of `circuit` in order, one kernel call per gate.
inline void apply_circuit(StateVector &state, const Circuit &circuit) {
    require(state.n_qubits() == circuit.n_qubits,
            "apply_circuit: qubit count mismatch");
    for (const auto &gate : circuit.gates) {
        apply_gate(state, gate);
    }
}

inline std::vector<double> probabilities(const StateVector &state) {
    std::vector<double> probs(state.size());
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = std::norm(amps[i]);
    }
    return probs;
}

}  // namespace qprior
