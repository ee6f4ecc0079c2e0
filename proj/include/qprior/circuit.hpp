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
 * Gate and circuit descriptions, the default entangling circuit, and the
 * plain-text circuit format.
 *
 * Text format, one record per line:
 *
 *     qprior-circuit 1
 *     n_qubits 16
 *     angle_seed 7
 *     SX 0
 *     RZ 3,4.1887902047863905
 *     ECR 0,1
 *
 * Angles are written in shortest round-trip decimal form, so a
 * write/read cycle reproduces every angle bit for bit. Lines starting with
 * `#` and blank lines are ignored.
 */

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qprior/errors.hpp"
#include "qprior/rng.hpp"

namespace qprior {

inline constexpr int kDefaultQubits = 16;
inline constexpr int kMaxQubits = 16;

enum class GateKind { X, SX, RX, RY, RZ, ECR };

constexpr std::string_view gate_name(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::X:
        return "X";
    case GateKind::SX:
        return "SX";
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::ECR:
        return "ECR";
    }
    return "?";
}

constexpr bool is_rotation(GateKind kind) noexcept {
    return kind == GateKind::RX || kind == GateKind::RY ||
           kind == GateKind::RZ;
}

constexpr bool is_two_qubit(GateKind kind) noexcept {
    return kind == GateKind::ECR;
}

struct Gate {
    GateKind kind = GateKind::X;
    int q0 = 0;
    int q1 = -1;  ///< second (target) qubit of ECR; -1 otherwise
    std::optional<double> angle;

    static Gate x(int q) { return {GateKind::X, q, -1, std::nullopt}; }
    static Gate sx(int q) { return {GateKind::SX, q, -1, std::nullopt}; }
    static Gate rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
    static Gate ry(int q, double theta) { return {GateKind::RY, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
    static Gate ecr(int a, int b) { return {GateKind::ECR, a, b, std::nullopt}; }

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// Throws InvalidArgument unless the gate is well formed on `n_qubits`.
inline void validate_gate(const Gate &gate, int n_qubits) {
    auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
    if (!in_range(gate.q0)) {
        throw InvalidArgument("gate " + std::string(gate_name(gate.kind)) +
                              ": qubit index " + std::to_string(gate.q0) +
                              " out of range [0, " +
                              std::to_string(n_qubits - 1) + "]");
    }
    if (is_two_qubit(gate.kind)) {
        if (!in_range(gate.q1)) {
            throw InvalidArgument("gate ECR: qubit index " +
                                  std::to_string(gate.q1) + " out of range");
        }
        require(gate.q0 != gate.q1, "gate ECR: qubits must be distinct");
    } else {
        require(gate.q1 == -1, "single-qubit gate carries a second qubit");
    }
    require(gate.angle.has_value() == is_rotation(gate.kind),
            "gate " + std::string(gate_name(gate.kind)) +
                ": angle must be present exactly for RX/RY/RZ");
}

struct Circuit {
    int n_qubits = kDefaultQubits;
    std::vector<Gate> gates;
    std::uint64_t angle_seed = 0;

    friend bool operator==(const Circuit &, const Circuit &) = default;
};

inline void validate_circuit(const Circuit &circuit) {
    require(circuit.n_qubits >= 1 && circuit.n_qubits <= kMaxQubits,
            "circuit: n_qubits must be in [1, 16]");
    for (const auto &gate : circuit.gates) {
        validate_gate(gate, circuit.n_qubits);
    }
}

/// Depth of the circuit counting two-qubit gates only (ASAP layering).
inline int two_qubit_depth(const Circuit &circuit) {
    std::vector<int> depth(static_cast<std::size_t>(circuit.n_qubits), 0);
    int result = 0;
    for (const auto &gate : circuit.gates) {
        if (!is_two_qubit(gate.kind)) {
            continue;
        }
        auto &da = depth[static_cast<std::size_t>(gate.q0)];
        auto &db = depth[static_cast<std::size_t>(gate.q1)];
        const int d = std::max(da, db) + 1;
        da = db = d;
        result = std::max(result, d);
    }
    return result;
}

/// True if every qubit participates in at least one two-qubit gate.
inline bool is_fully_entangling(const Circuit &circuit) {
    std::vector<bool> touched(static_cast<std::size_t>(circuit.n_qubits));
    for (const auto &gate : circuit.gates) {
        if (is_two_qubit(gate.kind)) {
            touched[static_cast<std::size_t>(gate.q0)] = true;
            touched[static_cast<std::size_t>(gate.q1)] = true;
        }
    }
    return std::all_of(touched.begin(), touched.end(),
                       [](bool t) { return t; });
}

/**
 * The default brickwork entangler on a linear chain.
 *
 * Preparation layer: SX on every qubit, X on odd qubits. Then `depth_target`
 * repetitions of a rotation layer followed by an ECR layer, and one closing
 * rotation layer. A rotation layer applies one rotation per qubit whose axis
 * cycles X, Y, Z with (qubit + layer); angles are uniform in [0, 2pi) and
 * drawn in gate order from the Angles stream of `angle_seed`. ECR layers
 * alternate between pairs (0,1),(2,3),... and (1,2),(3,4),..., so the
 * two-qubit depth equals `depth_target` exactly.
 */
inline Circuit build_default_circuit(std::uint64_t angle_seed, int depth_target,
                                     int n_qubits = kDefaultQubits) {
    require(depth_target >= 1, "build_default_circuit: depth_target must be >= 1");
    require(n_qubits >= 2 && n_qubits <= kMaxQubits,
            "build_default_circuit: n_qubits must be in [2, 16]");

    Circuit circuit;
    circuit.n_qubits = n_qubits;
    circuit.angle_seed = angle_seed;
    auto angles = Rng::stream(angle_seed, Purpose::Angles);
    auto draw_angle = [&angles] {
        return angles.uniform() * (2.0 * std::numbers::pi);
    };

    for (int q = 0; q < n_qubits; ++q) {
        circuit.gates.push_back(Gate::sx(q));
        if (q % 2 == 1) {
            circuit.gates.push_back(Gate::x(q));
        }
    }

    auto rotation_layer = [&](int layer) {
        for (int q = 0; q < n_qubits; ++q) {
            const double theta = draw_angle();
            switch ((q + layer) % 3) {
            case 0:
                circuit.gates.push_back(Gate::rx(q, theta));
                break;
            case 1:
                circuit.gates.push_back(Gate::ry(q, theta));
                break;
            default:
                circuit.gates.push_back(Gate::rz(q, theta));
                break;
            }
        }
    };

    for (int layer = 0; layer < depth_target; ++layer) {
        rotation_layer(layer);
        for (int a = layer % 2; a + 1 < n_qubits; a += 2) {
            circuit.gates.push_back(Gate::ecr(a, a + 1));
        }
    }
    rotation_layer(depth_target);
    return circuit;
}

namespace detail {

inline std::string format_double(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return {buffer, end};
}

template <typename T>
T parse_number(std::string_view text, const std::string &what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("circuit: cannot parse " + what + " '" +
                          std::string(text) + "'");
    }
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace detail

inline std::string circuit_to_text(const Circuit &circuit) {
    std::string out = "qprior-circuit 1\n";
    out += "n_qubits " + std::to_string(circuit.n_qubits) + "\n";
    out += "angle_seed " + std::to_string(circuit.angle_seed) + "\n";
    for (const auto &gate : circuit.gates) {
        out += gate_name(gate.kind);
        out += ' ';
        out += std::to_string(gate.q0);
        if (is_two_qubit(gate.kind)) {
            out += ',' + std::to_string(gate.q1);
        }
        if (gate.angle) {
            out += ',' + detail::format_double(*gate.angle);
        }
        out += '\n';
    }
    return out;
}

inline Circuit circuit_from_text(std::string_view text) {
    Circuit circuit;
    bool have_magic = false;
    bool have_qubits = false;
    bool have_seed = false;
    int line_no = 0;
    for (auto raw : detail::split(text, '\n')) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto space = line.find(' ');
        const auto key = line.substr(0, space);
        const auto rest = space == std::string_view::npos
                              ? std::string_view{}
                              : detail::trim(line.substr(space + 1));
        const auto where = "line " + std::to_string(line_no);
        if (!have_magic) {
            if (key != "qprior-circuit" || rest != "1") {
                throw FormatError("circuit: missing 'qprior-circuit 1' header");
            }
            have_magic = true;
            continue;
        }
        if (key == "n_qubits") {
            circuit.n_qubits = detail::parse_number<int>(rest, where);
            have_qubits = true;
            continue;
        }
        if (key == "angle_seed") {
            circuit.angle_seed = detail::parse_number<std::uint64_t>(rest, where);
            have_seed = true;
            continue;
        }
        Gate gate;
        if (key == "X") {
            gate.kind = GateKind::X;
        } else if (key == "SX") {
            gate.kind = GateKind::SX;
        } else if (key == "RX") {
            gate.kind = GateKind::RX;
        } else if (key == "RY") {
            gate.kind = GateKind::RY;
        } else if (key == "RZ") {
            gate.kind = GateKind::RZ;
        } else if (key == "ECR") {
            gate.kind = GateKind::ECR;
        } else {
            throw FormatError("circuit: unknown record '" + std::string(key) +
                              "' at " + where);
        }
        const auto fields = detail::split(rest, ',');
        const std::size_t expected =
            1 + (is_two_qubit(gate.kind) ? 1 : 0) + (is_rotation(gate.kind) ? 1 : 0);
        if (fields.size() != expected) {
            throw FormatError("circuit: wrong field count at " + where);
        }
        gate.q0 = detail::parse_number<int>(detail::trim(fields[0]), where);
        std::size_t next = 1;
        if (is_two_qubit(gate.kind)) {
            gate.q1 = detail::parse_number<int>(detail::trim(fields[next++]), where);
        }
        if (is_rotation(gate.kind)) {
            gate.angle = detail::parse_number<double>(detail::trim(fields[next]), where);
        }
        circuit.gates.push_back(gate);
    }
    if (!have_magic || !have_qubits || !have_seed) {
        throw FormatError("circuit: missing header lines (n_qubits, angle_seed)");
    }
    validate_circuit(circuit);
    return circuit;
}

inline void save_circuit(const Circuit &circuit, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << circuit_to_text(circuit);
    if (!out) {
        throw IoError("write failed: '" + path + "'");
    }
}

inline Circuit load_circuit(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return circuit_from_text(buffer.str());
}

}  // namespace qprior
