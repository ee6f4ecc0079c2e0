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
 * Bitstring pools: generation, merging, cursor draws and the QPOOL1 format.
 *
 * QPOOL1 layout (little-endian):
 *
 *     offset  size  field
 *     0       6     magic "QPOOL1"
 *     6       2     format version (u16, currently 1)
 *     8       1     n_qubits (u8, must be 16)
 *     9       1     reserved (u8, 0)
 *     10      8     total_shots (u64)
 *     18      4     metadata length L (u32)
 *     22      L     metadata, UTF-8 JSON
 *     22+L    2N    total_shots packed words (u16)
 */

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qprior/binary_io.hpp"
#include "qprior/circuit.hpp"
#include "qprior/errors.hpp"
#include "qprior/rng.hpp"
#include "qprior/simulator.hpp"

namespace qprior {

using nlohmann::json;

struct PoolMetadata {
    std::string source_label;
    int n_qubits = kDefaultQubits;
    std::uint64_t total_shots = 0;
    /// Zero for pools not produced by trajectories (classical, merged).
    std::uint64_t shots_per_trajectory = 0;
    std::uint64_t n_trajectories = 0;
    json seeds = json::object();
    /// NoiseModel parameters, or the string "classical".
    json noise_summary;
    /// Metadata of the parent pools of a merge, in argument order.
    json parents = json::array();
    /// Free-form resolved configuration echoed by the CLI.
    json config = json::object();
    /// ISO-8601 timestamp; empty when the producer opted out for reproducibility.
    std::string created_at;

    friend bool operator==(const PoolMetadata &, const PoolMetadata &) = default;
};

inline json to_json(const PoolMetadata &meta) {
    json j{{"source_label", meta.source_label},
           {"n_qubits", meta.n_qubits},
           {"total_shots", meta.total_shots},
           {"shots_per_trajectory", meta.shots_per_trajectory},
           {"n_trajectories", meta.n_trajectories},
           {"seeds", meta.seeds},
           {"noise_summary", meta.noise_summary},
           {"parents", meta.parents},
           {"config", meta.config}};
    if (!meta.created_at.empty()) {
        j["created_at"] = meta.created_at;
    }
    return j;
}

inline PoolMetadata metadata_from_json(const json &j) {
    PoolMetadata meta;
    try {
        meta.source_label = j.at("source_label").get<std::string>();
        meta.n_qubits = j.at("n_qubits").get<int>();
        meta.total_shots = j.at("total_shots").get<std::uint64_t>();
        meta.shots_per_trajectory = j.at("shots_per_trajectory").get<std::uint64_t>();
        meta.n_trajectories = j.at("n_trajectories").get<std::uint64_t>();
        meta.seeds = j.at("seeds");
        meta.noise_summary = j.at("noise_summary");
        meta.parents = j.value("parents", json::array());
        meta.config = j.value("config", json::object());
        meta.created_at = j.value("created_at", std::string{});
    } catch (const json::exception &e) {
        throw FormatError(std::string("pool metadata: ") + e.what());
    }
    return meta;
}

inline json noise_to_json(const NoiseModel &noise) {
    return json{{"pauli_p", noise.pauli_p},
                {"readout_p01", noise.readout_p01},
                {"readout_p10", noise.readout_p10},
                {"noise_seed", noise.noise_seed}};
}

struct BitstringPool {
    PoolMetadata metadata;
    std::vector<std::uint16_t> words;

    [[nodiscard]] std::size_t size() const noexcept { return words.size(); }

    friend bool operator==(const BitstringPool &, const BitstringPool &) = default;
};

/// Throws unless the pool is non-empty and consistent with its metadata.
inline void validate_pool(const BitstringPool &pool) {
    require(!pool.words.empty(), "pool: empty pools are not allowed");
    require(pool.metadata.n_qubits >= 1 && pool.metadata.n_qubits <= kMaxQubits,
            "pool: n_qubits must be in [1, 16]");
    require(pool.metadata.total_shots == pool.words.size(),
            "pool: metadata.total_shots does not match word count");
    if (pool.metadata.n_trajectories != 0) {
        require(pool.metadata.shots_per_trajectory * pool.metadata.n_trajectories ==
                    pool.metadata.total_shots,
                "pool: total_shots != shots_per_trajectory * n_trajectories");
    }
}

inline BitstringPool generate_quantum_pool(const Circuit &circuit, const NoiseModel &noise,
                                           std::uint64_t shots_per_trajectory,
                                           std::uint64_t n_trajectories,
                                           std::uint64_t sample_seed,
                                           std::string source_label = {},
                                           SampleOptions options = {}) {
    require(shots_per_trajectory >= 1 && n_trajectories >= 1,
            "generate_quantum_pool: counts must be >= 1");
    auto batch = sample_shots(circuit, noise, shots_per_trajectory * n_trajectories,
                              n_trajectories, sample_seed, options);
    BitstringPool pool;
    auto &meta = pool.metadata;
    if (source_label.empty()) {
        source_label =
            noise.has_gate_noise() || noise.has_readout_noise() ? "noisy" : "noiseless";
    }
    meta.source_label = std::move(source_label);
    meta.n_qubits = circuit.n_qubits;
    meta.total_shots = batch.words.size();
    meta.shots_per_trajectory = shots_per_trajectory;
    meta.n_trajectories = n_trajectories;
    meta.seeds = json{{"angle_seed", circuit.angle_seed},
                      {"noise_seed", noise.noise_seed},
                      {"sample_seed", sample_seed}};
    meta.noise_summary = noise_to_json(noise);
    meta.config = json{{"circuit_gates", circuit.gates.size()},
                       {"two_qubit_depth", two_qubit_depth(circuit)}};
    pool.words = std::move(batch.words);
    return pool;
}

/// Every bit of every word is an independent fair coin: each 64-bit output
/// of the Classical stream supplies four consecutive words.
inline BitstringPool generate_classical_pool(std::uint64_t total_shots, std::uint64_t seed) {
    require(total_shots >= 1, "generate_classical_pool: total_shots must be >= 1");
    BitstringPool pool;
    pool.words.resize(total_shots);
    Rng rng = Rng::stream(seed, Purpose::Classical);
    for (std::uint64_t i = 0; i < total_shots; i += 4) {
        std::uint64_t r = rng.next();
        for (std::uint64_t k = i; k < std::min(i + 4, total_shots); ++k) {
            pool.words[k] = static_cast<std::uint16_t>(r & 0xFFFFU);
            r >>= 16;
        }
    }
    auto &meta = pool.metadata;
    meta.source_label = "classical";
    meta.n_qubits = kDefaultQubits;
    meta.total_shots = total_shots;
    meta.seeds = json{{"classical_seed", seed}};
    meta.noise_summary = "classical";
    return pool;
}

/// Concatenates a and b and applies a seeded Fisher-Yates shuffle.
inline BitstringPool merge_pools(const BitstringPool &a, const BitstringPool &b,
                                 std::uint64_t shuffle_seed) {
    require(!a.words.empty() && !b.words.empty(), "merge_pools: empty pools are not allowed");
    require(a.metadata.n_qubits == b.metadata.n_qubits,
            "merge_pools: n_qubits mismatch (" + std::to_string(a.metadata.n_qubits) +
                " vs " + std::to_string(b.metadata.n_qubits) + ")");
    BitstringPool merged;
    merged.words.reserve(a.size() + b.size());
    merged.words.insert(merged.words.end(), a.words.begin(), a.words.end());
    merged.words.insert(merged.words.end(), b.words.begin(), b.words.end());
    Rng rng = Rng::stream(shuffle_seed, Purpose::Shuffle);
    for (std::size_t i = merged.words.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(merged.words[i], merged.words[j]);
    }
    auto &meta = merged.metadata;
    meta.source_label = "merged";
    meta.n_qubits = a.metadata.n_qubits;
    meta.total_shots = merged.words.size();
    meta.seeds = json{{"shuffle_seed", shuffle_seed}};
    meta.noise_summary = json{{"merged", json::array({a.metadata.noise_summary,
                                                      b.metadata.noise_summary})}};
    meta.parents = json::array({to_json(a.metadata), to_json(b.metadata)});
    return merged;
}

struct PoolCursor {
    std::uint64_t position = 0;
    std::uint64_t wrap_count = 0;

    friend bool operator==(const PoolCursor &, const PoolCursor &) = default;
};

enum class CursorPolicy {
    Wrap,    ///< restart at word 0 after the end, counting passes
    Strict,  ///< never reuse a shot; running past the end raises ExhaustedError
};

/// S consecutive shots; row s is the packed word of shot s.
struct BitBlock {
    int n_qubits = kDefaultQubits;
    std::vector<std::uint16_t> rows;

    [[nodiscard]] std::size_t shots() const noexcept { return rows.size(); }
    [[nodiscard]] int bit(std::size_t shot, int qubit) const noexcept {
        return (rows[shot] >> qubit) & 1;
    }
};

inline BitBlock draw_block(const BitstringPool &pool, PoolCursor &cursor,
                           std::size_t shots_per_sample,
                           CursorPolicy policy = CursorPolicy::Wrap) {
    require(shots_per_sample >= 1, "draw_block: S must be >= 1");
    const std::size_t n = pool.words.size();
    require(n >= shots_per_sample, "draw_block: pool shorter than S");
    require(cursor.position < n, "draw_block: cursor position out of range");
    if (policy == CursorPolicy::Strict &&
        (cursor.wrap_count > 0 || cursor.position + shots_per_sample > n)) {
        throw ExhaustedError("pool exhausted: " + std::to_string(n - cursor.position) +
                             " unused shots left, block needs " +
                             std::to_string(shots_per_sample));
    }
    BitBlock block;
    block.n_qubits = pool.metadata.n_qubits;
    block.rows.resize(shots_per_sample);
    std::size_t pos = cursor.position;
    for (auto &row : block.rows) {
        row = pool.words[pos];
        if (++pos == n) {
            pos = 0;
            ++cursor.wrap_count;
        }
    }
    cursor.position = pos;
    return block;
}

inline constexpr char kPoolMagic[6] = {'Q', 'P', 'O', 'O', 'L', '1'};
inline constexpr std::uint16_t kPoolVersion = 1;

inline std::string encode_pool(const BitstringPool &pool) {
    validate_pool(pool);
    require(pool.metadata.n_qubits == kDefaultQubits,
            "save_pool: the QPOOL1 format stores 16-qubit pools only");
    const std::string meta = to_json(pool.metadata).dump();
    io::Writer w;
    w.bytes({kPoolMagic, sizeof kPoolMagic});
    w.put<std::uint16_t>(kPoolVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(pool.metadata.n_qubits));
    w.put<std::uint8_t>(0);
    w.put<std::uint64_t>(pool.words.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(meta.size()));
    w.bytes(meta);
    w.put_all<std::uint16_t>(pool.words);
    return w.data();
}

inline BitstringPool decode_pool(std::string data) {
    io::Reader r(std::move(data), "pool");
    if (r.bytes(sizeof kPoolMagic, "magic") != std::string_view(kPoolMagic, sizeof kPoolMagic)) {
        throw FormatError("pool: bad magic (not a QPOOL1 file)");
    }
    const auto version = r.get<std::uint16_t>("version");
    if (version != kPoolVersion) {
        throw VersionError("pool: unsupported format version " + std::to_string(version) +
                           " (expected " + std::to_string(kPoolVersion) + ")");
    }
    const auto n_qubits = r.get<std::uint8_t>("n_qubits");
    if (n_qubits != kDefaultQubits) {
        throw FormatError("pool: unsupported n_qubits " + std::to_string(n_qubits));
    }
    r.get<std::uint8_t>("reserved");
    const auto total = r.get<std::uint64_t>("total_shots");
    const auto meta_len = r.get<std::uint32_t>("metadata length");
    const auto meta_text = r.bytes(meta_len, "metadata");
    json meta_json;
    try {
        meta_json = json::parse(meta_text);
    } catch (const json::exception &e) {
        throw FormatError(std::string("pool: metadata is not valid JSON: ") + e.what());
    }
    BitstringPool pool;
    pool.metadata = metadata_from_json(meta_json);
    if (pool.metadata.total_shots != total || pool.metadata.n_qubits != n_qubits) {
        throw FormatError("pool: header and metadata disagree");
    }
    if (total == 0) {
        throw FormatError("pool: empty pools are not allowed");
    }
    const std::uint64_t available = r.remaining() / sizeof(std::uint16_t);
    if (available < total) {
        throw TruncationError("pool: truncated payload, expected " + std::to_string(total) +
                              " words, found " + std::to_string(available));
    }
    if (r.remaining() != total * sizeof(std::uint16_t)) {
        throw FormatError("pool: trailing bytes after " + std::to_string(total) + " words");
    }
    pool.words.resize(total);
    r.get_all<std::uint16_t>(pool.words);
    return pool;
}

inline void save_pool(const BitstringPool &pool, const std::string &path) {
    io::write_file(path, encode_pool(pool));
}

inline BitstringPool load_pool(const std::string &path) {
    return decode_pool(io::read_file(path));
}

}  // namespace qprior
