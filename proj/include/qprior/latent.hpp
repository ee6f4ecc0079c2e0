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
 * Bits to latent vectors.
 *
 * A latent sample consumes one block of S shots. For every qubit the S bits
 * are read as a binary number k (first shot most significant) and mapped to
 * a uniform-like u in (0, 1):
 *
 * - centered (default): u = (k + 1/2) / 2^S;
 * - paper-literal:      u = sum_s b_s 2^-(s+1) = k / 2^(S+1), clamped to
 *                       [clamp_epsilon, 1 - clamp_epsilon]. This range
 *                       tops out at 1/2 - 2^-(S+1), so every coordinate is
 *                       non-positive after the quantile transform.
 *
 * x = Phi^-1(u) gives a 16-vector with standard-normal-like marginals that
 * keeps the rank dependence between qubits. A fixed z_dim x 16 matrix P with
 * orthonormal columns embeds it: z_quant = X P^T. The hybrid prior is
 * alpha z_quant + (1 - alpha) z_class with no renormalization.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qprior/binary_io.hpp"
#include "qprior/errors.hpp"
#include "qprior/normal.hpp"
#include "qprior/pool.hpp"
#include "qprior/rng.hpp"

namespace qprior {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kLatentQubits = kDefaultQubits;
inline constexpr std::size_t kMaxShotsPerSample = 52;

enum class EncodingMode { Centered, PaperLiteral };

inline std::string to_string(EncodingMode mode) {
    return mode == EncodingMode::Centered ? "centered" : "paper-literal";
}

inline EncodingMode encoding_mode_from_string(const std::string &name) {
    if (name == "centered") {
        return EncodingMode::Centered;
    }
    if (name == "paper-literal") {
        return EncodingMode::PaperLiteral;
    }
    throw InvalidArgument("unknown encoding mode '" + name +
                          "' (expected centered or paper-literal)");
}

struct EncodingConfig {
    /// Shots per latent sample; at most 52 so that u is exact in a double.
    std::size_t shots_per_sample = 16;
    EncodingMode mode = EncodingMode::Centered;
    /// Probability floor, paper-literal mode only.
    double clamp_epsilon = 1e-6;
};

inline void validate_encoding(const EncodingConfig &config) {
    require(config.shots_per_sample >= 1 && config.shots_per_sample <= kMaxShotsPerSample,
            "encoding: S must be in [1, 52]");
    require(config.clamp_epsilon > 0.0 && config.clamp_epsilon < 0.5,
            "encoding: clamp_epsilon must lie in (0, 0.5)");
}

using QubitValues = std::array<double, kLatentQubits>;

/// Per-qubit binary fraction of an S x 16 block.
inline QubitValues binary_fraction(const BitBlock &block, const EncodingConfig &config) {
    validate_encoding(config);
    if (block.shots() != config.shots_per_sample) {
        throw InvalidArgument("binary_fraction: block has " + std::to_string(block.shots()) +
                              " shots, config expects S=" +
                              std::to_string(config.shots_per_sample));
    }
    require(block.n_qubits == kLatentQubits, "binary_fraction: block must have 16 qubits");
    const int s_bits = static_cast<int>(config.shots_per_sample);
    std::array<std::uint64_t, kLatentQubits> k{};
    for (const auto row : block.rows) {
        for (int q = 0; q < kLatentQubits; ++q) {
            k[static_cast<std::size_t>(q)] =
                (k[static_cast<std::size_t>(q)] << 1) | ((row >> q) & 1U);
        }
    }
    QubitValues u{};
    for (std::size_t q = 0; q < u.size(); ++q) {
        if (config.mode == EncodingMode::Centered) {
            u[q] = std::ldexp(static_cast<double>(k[q]) + 0.5, -s_bits);
        } else {
            const double raw = std::ldexp(static_cast<double>(k[q]), -(s_bits + 1));
            u[q] = std::clamp(raw, config.clamp_epsilon, 1.0 - config.clamp_epsilon);
        }
    }
    return u;
}

struct ProjectionMatrix {
    Matrix values;  ///< z_dim x 16
    std::size_t z_dim = 0;
    std::uint64_t projection_seed = 0;
};

/**
 * Draws a z_dim x 16 Gaussian matrix from the Projection stream (row-major
 * order) and orthonormalizes its columns with Householder QR. Column signs
 * are fixed so that R has a positive diagonal.
 */
inline ProjectionMatrix make_projection(std::size_t z_dim, std::uint64_t projection_seed) {
    require(z_dim >= static_cast<std::size_t>(kLatentQubits),
            "make_projection: z_dim must be >= 16");
    const auto rows = static_cast<Eigen::Index>(z_dim);
    Matrix gaussian(rows, kLatentQubits);
    Rng rng = Rng::stream(projection_seed, Purpose::Projection);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < kLatentQubits; ++c) {
            gaussian(r, c) = rng.normal();
        }
    }
    Eigen::MatrixXd dense = gaussian;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(dense);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, kLatentQubits);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(kLatentQubits).triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < kLatentQubits; ++c) {
        if (r(c, c) < 0.0) {
            q.col(c) *= -1.0;
        }
    }
    ProjectionMatrix p;
    p.values = q;
    p.z_dim = z_dim;
    p.projection_seed = projection_seed;
    return p;
}

/// Rows of u (before the quantile transform) and X (after), B x 16 each.
struct QuantumFeatures {
    Matrix u;
    Matrix x;
};

/// Draws B blocks from the pool and encodes each into one row of U and X.
inline QuantumFeatures quantum_features(const BitstringPool &pool, PoolCursor &cursor,
                                        std::size_t batch_size, const EncodingConfig &config,
                                        CursorPolicy policy = CursorPolicy::Wrap) {
    validate_encoding(config);
    require(batch_size >= 1, "quantum_features: B must be >= 1");
    require(pool.metadata.n_qubits == kLatentQubits, "quantum_features: pool must have 16 qubits");
    const auto rows = static_cast<Eigen::Index>(batch_size);
    QuantumFeatures out{Matrix(rows, kLatentQubits), Matrix(rows, kLatentQubits)};
    for (Eigen::Index b = 0; b < rows; ++b) {
        const auto block = draw_block(pool, cursor, config.shots_per_sample, policy);
        const auto u = binary_fraction(block, config);
        for (int q = 0; q < kLatentQubits; ++q) {
            out.u(b, q) = u[static_cast<std::size_t>(q)];
            out.x(b, q) = inverse_normal_cdf(u[static_cast<std::size_t>(q)]);
        }
    }
    return out;
}

inline Matrix project(const Matrix &x, const ProjectionMatrix &p) {
    require(x.cols() == kLatentQubits, "project: X must have 16 columns");
    return x * p.values.transpose();
}

inline Matrix sample_quantum_latents(const BitstringPool &pool, PoolCursor &cursor,
                                     std::size_t batch_size, const EncodingConfig &config,
                                     const ProjectionMatrix &p,
                                     CursorPolicy policy = CursorPolicy::Wrap) {
    return project(quantum_features(pool, cursor, batch_size, config, policy).x, p);
}

/// i.i.d. N(0, 1) entries in row-major order (Marsaglia polar method).
inline Matrix sample_classical_latents(std::size_t batch_size, std::size_t z_dim,
                                       std::uint64_t seed) {
    require(batch_size >= 1 && z_dim >= 1, "sample_classical_latents: B and z_dim must be >= 1");
    Matrix z(static_cast<Eigen::Index>(batch_size), static_cast<Eigen::Index>(z_dim));
    Rng rng = Rng::stream(seed, Purpose::Gaussian);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z.data()[i] = rng.normal();
    }
    return z;
}

inline Matrix hybrid(const Matrix &z_quant, const Matrix &z_class, double alpha) {
    require(z_quant.rows() == z_class.rows() && z_quant.cols() == z_class.cols(),
            "hybrid: z_quant and z_class shapes differ");
    require(alpha >= 0.0 && alpha <= 1.0, "hybrid: alpha must lie in [0, 1]");
    if (alpha == 0.0) {
        return z_class;
    }
    if (alpha == 1.0) {
        return z_quant;
    }
    return alpha * z_quant + (1.0 - alpha) * z_class;
}

struct LatentBatch {
    Matrix values;  ///< B x z_dim
    double alpha = 1.0;
    nlohmann::json provenance = nlohmann::json::object();
};

/**
 * QLAT1 layout (little-endian): magic "QLAT1\0", version u16, B u64,
 * z_dim u32, alpha f64, provenance JSON length u32 and bytes, then
 * B*z_dim binary32 values in row-major order. Values are rounded to
 * binary32 on export; a batch whose values are already binary32 round-trips
 * bit for bit.
 */
inline constexpr char kLatentMagic[6] = {'Q', 'L', 'A', 'T', '1', '\0'};
inline constexpr std::uint16_t kLatentVersion = 1;

inline std::string encode_latents(const LatentBatch &batch) {
    require(batch.values.rows() >= 1 && batch.values.cols() >= 1,
            "export_latents: empty batch");
    require(batch.values.allFinite(), "export_latents: batch contains non-finite values");
    require(batch.alpha >= 0.0 && batch.alpha <= 1.0, "export_latents: alpha out of range");
    const std::string provenance = batch.provenance.dump();
    io::Writer w;
    w.bytes({kLatentMagic, sizeof kLatentMagic});
    w.put<std::uint16_t>(kLatentVersion);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(batch.values.rows()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(batch.values.cols()));
    w.put<double>(batch.alpha);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(provenance.size()));
    w.bytes(provenance);
    for (Eigen::Index i = 0; i < batch.values.size(); ++i) {
        w.put<float>(static_cast<float>(batch.values.data()[i]));
    }
    return w.data();
}

inline LatentBatch decode_latents(std::string data) {
    io::Reader r(std::move(data), "latents");
    if (r.bytes(sizeof kLatentMagic, "magic") !=
        std::string_view(kLatentMagic, sizeof kLatentMagic)) {
        throw FormatError("latents: bad magic (not a QLAT1 file)");
    }
    const auto version = r.get<std::uint16_t>("version");
    if (version != kLatentVersion) {
        throw VersionError("latents: unsupported format version " + std::to_string(version));
    }
    const auto rows = r.get<std::uint64_t>("B");
    const auto cols = r.get<std::uint32_t>("z_dim");
    LatentBatch batch;
    batch.alpha = r.get<double>("alpha");
    const auto prov_len = r.get<std::uint32_t>("provenance length");
    try {
        batch.provenance = nlohmann::json::parse(r.bytes(prov_len, "provenance"));
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("latents: provenance is not valid JSON: ") + e.what());
    }
    if (rows == 0 || cols == 0) {
        throw FormatError("latents: empty batch");
    }
    const std::uint64_t expected = rows * cols;
    const std::uint64_t available = r.remaining() / sizeof(float);
    if (available < expected) {
        throw TruncationError("latents: truncated payload, expected " + std::to_string(expected) +
                              " values, found " + std::to_string(available));
    }
    if (r.remaining() != expected * sizeof(float)) {
        throw FormatError("latents: trailing bytes after payload");
    }
    batch.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < batch.values.size(); ++i) {
        batch.values.data()[i] = r.get<float>("payload");
    }
    return batch;
}

inline void export_latents(const LatentBatch &batch, const std::string &path) {
    io::write_file(path, encode_latents(batch));
}

inline LatentBatch import_latents(const std::string &path) {
    return decode_latents(io::read_file(path));
}

}  // namespace qprior
