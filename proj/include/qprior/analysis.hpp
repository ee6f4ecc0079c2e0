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
 * Diagnostics over pools and latent batches.
 *
 * JSON report fields (see README for the full schema):
 *
 * - pool stats: total_shots, distinct_patterns, missing_patterns,
 *   max_frequency, entropy_bits, per_bit_means[, histogram]
 * - correlation: n_samples, matrix (null for undefined entries), defined,
 *   offdiag_abs_mean, offdiag_abs_std, n_pairs
 * - latent report: rows, cols, means, variances, min, max, non_finite,
 *   covariance_eigenvalues (descending), rank_above_1e-6
 *
 * Correlation summaries are the mean and population standard deviation of
 * |r| over upper-triangle pairs whose columns both vary; a constant column
 * makes its entries undefined.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qprior/errors.hpp"
#include "qprior/latent.hpp"
#include "qprior/normal.hpp"
#include "qprior/pool.hpp"
#include "qprior/simulator.hpp"

namespace qprior {

struct PoolStats {
    std::uint64_t total_shots = 0;
    std::vector<std::uint64_t> histogram;
    std::uint64_t distinct_patterns = 0;
    std::uint64_t missing_patterns = 0;
    std::uint64_t max_frequency = 0;
    double entropy_bits = 0.0;
    std::vector<double> per_bit_means;
};

/// Shannon entropy in bits of a count histogram, with 0 log 0 = 0.
inline double entropy_bits(std::span<const std::uint64_t> histogram) {
    const double total = static_cast<double>(
        std::accumulate(histogram.begin(), histogram.end(), std::uint64_t{0}));
    if (total == 0.0) {
        return 0.0;
    }
    double h = 0.0;
    for (const auto count : histogram) {
        if (count != 0) {
            const double p = static_cast<double>(count) / total;
            h -= p * std::log2(p);
        }
    }
    return std::max(h, 0.0);
}

inline std::vector<std::uint64_t> word_histogram(std::span<const std::uint16_t> words,
                                                 int n_qubits) {
    std::vector<std::uint64_t> histogram(std::size_t{1} << n_qubits, 0);
    const std::uint32_t mask = (1U << n_qubits) - 1U;
    for (const auto w : words) {
        ++histogram[w & mask];
    }
    return histogram;
}

inline PoolStats pool_stats(std::span<const std::uint16_t> words,
                            int n_qubits = kDefaultQubits) {
    require(!words.empty(), "pool_stats: empty pool");
    PoolStats stats;
    stats.total_shots = words.size();
    stats.histogram = word_histogram(words, n_qubits);
    stats.per_bit_means.assign(static_cast<std::size_t>(n_qubits), 0.0);
    std::vector<std::uint64_t> ones(static_cast<std::size_t>(n_qubits), 0);
    for (std::size_t w = 0; w < stats.histogram.size(); ++w) {
        const auto count = stats.histogram[w];
        if (count == 0) {
            ++stats.missing_patterns;
            continue;
        }
        ++stats.distinct_patterns;
        stats.max_frequency = std::max(stats.max_frequency, count);
        for (int q = 0; q < n_qubits; ++q) {
            if ((w >> q) & 1U) {
                ones[static_cast<std::size_t>(q)] += count;
            }
        }
    }
    for (std::size_t q = 0; q < ones.size(); ++q) {
        stats.per_bit_means[q] =
            static_cast<double>(ones[q]) / static_cast<double>(stats.total_shots);
    }
    stats.entropy_bits = entropy_bits(stats.histogram);
    return stats;
}

inline PoolStats pool_stats(const BitstringPool &pool) {
    return pool_stats(pool.words, pool.metadata.n_qubits);
}

struct CorrelationReport {
    std::uint64_t n_samples = 0;
    /// Pearson matrix; NaN marks entries involving a constant column.
    Matrix matrix;
    std::vector<bool> defined;  ///< per column: false if constant
    double offdiag_abs_mean = 0.0;
    double offdiag_abs_std = 0.0;
    std::size_t n_pairs = 0;  ///< pairs entering the summary
};

namespace detail {

inline void summarize_offdiagonal(CorrelationReport &report) {
    std::vector<double> values;
    const auto n = report.matrix.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (report.defined[static_cast<std::size_t>(i)] &&
                report.defined[static_cast<std::size_t>(j)]) {
                values.push_back(std::fabs(report.matrix(i, j)));
            }
        }
    }
    report.n_pairs = values.size();
    if (values.empty()) {
        report.offdiag_abs_mean = std::numeric_limits<double>::quiet_NaN();
        report.offdiag_abs_std = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    report.offdiag_abs_mean = mean;
    report.offdiag_abs_std = std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace detail

/**
 * Pearson correlations between the qubit bit columns of a shot sequence.
 * Sums are taken over the pattern histogram in exact integer arithmetic.
 */
inline CorrelationReport correlation_report(std::span<const std::uint16_t> words,
                                            int n_qubits = kDefaultQubits) {
    require(words.size() >= 2, "correlation_report: need at least 2 samples");
    const auto histogram = word_histogram(words, n_qubits);
    const auto nq = static_cast<std::size_t>(n_qubits);
    std::vector<std::uint64_t> ones(nq, 0);
    std::vector<std::uint64_t> both(nq * nq, 0);
    for (std::size_t w = 0; w < histogram.size(); ++w) {
        const auto count = histogram[w];
        if (count == 0) {
            continue;
        }
        for (std::size_t i = 0; i < nq; ++i) {
            if (((w >> i) & 1U) == 0) {
                continue;
            }
            ones[i] += count;
            for (std::size_t j = i + 1; j < nq; ++j) {
                if ((w >> j) & 1U) {
                    both[i * nq + j] += count;
                }
            }
        }
    }
    using Wide = __int128;
    const auto n = static_cast<Wide>(words.size());
    CorrelationReport report;
    report.n_samples = words.size();
    report.matrix = Matrix::Constant(n_qubits, n_qubits, std::numeric_limits<double>::quiet_NaN());
    report.defined.assign(nq, false);
    std::vector<double> spread(nq, 0.0);
    for (std::size_t i = 0; i < nq; ++i) {
        const auto s = static_cast<Wide>(ones[i]);
        const Wide var = n * s - s * s;
        report.defined[i] = var > 0;
        spread[i] = std::sqrt(static_cast<double>(var));
        if (report.defined[i]) {
            report.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        }
    }
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = i + 1; j < nq; ++j) {
            if (!report.defined[i] || !report.defined[j]) {
                continue;
            }
            const Wide num = n * static_cast<Wide>(both[i * nq + j]) -
                             static_cast<Wide>(ones[i]) * static_cast<Wide>(ones[j]);
            const double r =
                std::clamp(static_cast<double>(num) / (spread[i] * spread[j]), -1.0, 1.0);
            report.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
            report.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
        }
    }
    detail::summarize_offdiagonal(report);
    return report;
}

inline CorrelationReport correlation_report(const BitstringPool &pool) {
    return correlation_report(pool.words, pool.metadata.n_qubits);
}

/// Pearson correlations between the columns of a sample matrix.
inline CorrelationReport correlation_report(const Matrix &samples) {
    require(samples.rows() >= 2, "correlation_report: need at least 2 samples");
    const Eigen::RowVectorXd mean = samples.colwise().mean();
    const Matrix centered = samples.rowwise() - mean;
    const Eigen::MatrixXd gram = centered.transpose() * centered;
    const auto n = samples.cols();
    CorrelationReport report;
    report.n_samples = static_cast<std::uint64_t>(samples.rows());
    report.matrix = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    report.defined.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        report.defined[static_cast<std::size_t>(i)] = gram(i, i) > 0.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!report.defined[static_cast<std::size_t>(i)]) {
            continue;
        }
        report.matrix(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!report.defined[static_cast<std::size_t>(j)]) {
                continue;
            }
            const double r =
                std::clamp(gram(i, j) / std::sqrt(gram(i, i) * gram(j, j)), -1.0, 1.0);
            report.matrix(i, j) = r;
            report.matrix(j, i) = r;
        }
    }
    detail::summarize_offdiagonal(report);
    return report;
}

/// Average ranks (1-based) of a sequence; ties share the mean of their ranks.
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (std::size_t k = i; k < j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j;
    }
    return ranks;
}

/// Spearman rank correlations between columns (Pearson over average ranks).
inline CorrelationReport spearman_report(const Matrix &samples) {
    require(samples.rows() >= 2, "spearman_report: need at least 2 samples");
    Matrix ranks(samples.rows(), samples.cols());
    std::vector<double> column(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
        for (Eigen::Index r = 0; r < samples.rows(); ++r) {
            column[static_cast<std::size_t>(r)] = samples(r, c);
        }
        const auto rk = average_ranks(column);
        for (Eigen::Index r = 0; r < samples.rows(); ++r) {
            ranks(r, c) = rk[static_cast<std::size_t>(r)];
        }
    }
    return correlation_report(ranks);
}

/// One-sample Kolmogorov-Smirnov statistic against N(0, 1).
inline double ks_statistic_normal(std::span<const double> values) {
    require(!values.empty(), "ks_statistic_normal: empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = normal_cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - cdf,
                      cdf - static_cast<double>(i) / n});
    }
    return d;
}

struct SweepPoint {
    NoiseModel noise;
    PoolStats stats;
    CorrelationReport correlation;
};

struct SweepConfig {
    std::uint64_t shots_per_trajectory = 4000;
    std::uint64_t n_trajectories = 256;
    std::uint64_t sample_seed = 0;
    SampleOptions options;
};

/// Requires at least two points, each no weaker than the previous
/// (pauli_p and every readout probability non-decreasing).
inline void validate_sweep_grid(std::span<const NoiseModel> grid, int n_qubits) {
    require(grid.size() >= 2, "noise_sweep: grid needs at least 2 noise points");
    auto readout_at = [](const std::vector<double> &v, std::size_t q) {
        return v.empty() ? 0.0 : v[q];
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        validate_noise(grid[k], n_qubits);
        if (k == 0) {
            continue;
        }
        const auto &prev = grid[k - 1];
        const auto &cur = grid[k];
        bool weaker = cur.pauli_p < prev.pauli_p;
        for (std::size_t q = 0; q < static_cast<std::size_t>(n_qubits); ++q) {
            weaker = weaker || readout_at(cur.readout_p01, q) < readout_at(prev.readout_p01, q) ||
                     readout_at(cur.readout_p10, q) < readout_at(prev.readout_p10, q);
        }
        require(!weaker, "noise_sweep: grid must be ordered by increasing noise strength");
    }
}

inline std::vector<SweepPoint> noise_sweep(const Circuit &circuit,
                                           std::span<const NoiseModel> grid,
                                           const SweepConfig &config) {
    validate_sweep_grid(grid, circuit.n_qubits);
    std::vector<SweepPoint> points;
    points.reserve(grid.size());
    for (const auto &noise : grid) {
        const auto batch = sample_shots(circuit, noise,
                                        config.shots_per_trajectory * config.n_trajectories,
                                        config.n_trajectories, config.sample_seed, config.options);
        points.push_back({noise, pool_stats(batch.words, circuit.n_qubits),
                          correlation_report(batch.words, circuit.n_qubits)});
    }
    return points;
}

struct LatentReport {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> means;
    std::vector<double> variances;
    std::vector<double> covariance_eigenvalues;  ///< descending
    double min = 0.0;
    double max = 0.0;
    std::size_t non_finite = 0;

    [[nodiscard]] std::size_t rank_above(double tolerance) const {
        return static_cast<std::size_t>(std::count_if(
            covariance_eigenvalues.begin(), covariance_eigenvalues.end(),
            [tolerance](double v) { return v > tolerance; }));
    }
};

/// Sample mean, unbiased variance and covariance spectrum per column.
/// Non-finite entries are counted; statistics then cover finite rows only.
inline LatentReport latent_report(const Matrix &values) {
    require(values.rows() >= 1 && values.cols() >= 1, "latent_report: empty batch");
    LatentReport report;
    report.rows = static_cast<std::size_t>(values.rows());
    report.cols = static_cast<std::size_t>(values.cols());
    std::vector<Eigen::Index> finite_rows;
    finite_rows.reserve(report.rows);
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        const auto bad = static_cast<std::size_t>(
            (!values.row(r).array().isFinite()).count());
        report.non_finite += bad;
        if (bad == 0) {
            finite_rows.push_back(r);
        }
    }
    Matrix clean(static_cast<Eigen::Index>(finite_rows.size()), values.cols());
    for (std::size_t i = 0; i < finite_rows.size(); ++i) {
        clean.row(static_cast<Eigen::Index>(i)) = values.row(finite_rows[i]);
    }
    if (clean.rows() == 0) {
        return report;
    }
    report.min = clean.minCoeff();
    report.max = clean.maxCoeff();
    const Eigen::RowVectorXd mean = clean.colwise().mean();
    const Matrix centered = clean.rowwise() - mean;
    const double denom = clean.rows() > 1 ? static_cast<double>(clean.rows() - 1) : 1.0;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    report.means.assign(mean.data(), mean.data() + mean.size());
    report.variances.resize(report.cols);
    for (std::size_t c = 0; c < report.cols; ++c) {
        report.variances[c] = cov(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    const auto &ev = solver.eigenvalues();
    report.covariance_eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(report.covariance_eigenvalues.rbegin(), report.covariance_eigenvalues.rend());
    return report;
}

inline LatentReport latent_report(const LatentBatch &batch) {
    return latent_report(batch.values);
}

// JSON and CSV output.

inline nlohmann::json to_json(const PoolStats &stats, bool include_histogram = false) {
    nlohmann::json j{{"total_shots", stats.total_shots},
                     {"distinct_patterns", stats.distinct_patterns},
                     {"missing_patterns", stats.missing_patterns},
                     {"max_frequency", stats.max_frequency},
                     {"entropy_bits", stats.entropy_bits},
                     {"per_bit_means", stats.per_bit_means}};
    if (include_histogram) {
        j["histogram"] = stats.histogram;
    }
    return j;
}

inline nlohmann::json to_json(const CorrelationReport &report) {
    nlohmann::json matrix = nlohmann::json::array();
    for (Eigen::Index i = 0; i < report.matrix.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < report.matrix.cols(); ++j) {
            const double v = report.matrix(i, j);
            row.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        }
        matrix.push_back(std::move(row));
    }
    auto number_or_null = [](double v) {
        return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    };
    return {{"n_samples", report.n_samples},
            {"matrix", std::move(matrix)},
            {"defined", report.defined},
            {"offdiag_abs_mean", number_or_null(report.offdiag_abs_mean)},
            {"offdiag_abs_std", number_or_null(report.offdiag_abs_std)},
            {"n_pairs", report.n_pairs}};
}

inline nlohmann::json to_json(const LatentReport &report) {
    return {{"rows", report.rows},
            {"cols", report.cols},
            {"means", report.means},
            {"variances", report.variances},
            {"min", report.min},
            {"max", report.max},
            {"non_finite", report.non_finite},
            {"covariance_eigenvalues", report.covariance_eigenvalues},
            {"rank_above_1e-6", report.rank_above(1e-6)}};
}

inline nlohmann::json sweep_to_json(std::span<const SweepPoint> points) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &p : points) {
        rows.push_back({{"noise", noise_to_json(p.noise)},
                        {"stats", to_json(p.stats)},
                        {"correlation", to_json(p.correlation)}});
    }
    return rows;
}

/// CSV with a header row of column indices; undefined entries are written as NA.
inline std::string correlation_csv(const CorrelationReport &report) {
    std::ostringstream out;
    out.precision(17);
    out << "qubit";
    for (Eigen::Index j = 0; j < report.matrix.cols(); ++j) {
        out << ',' << j;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < report.matrix.rows(); ++i) {
        out << i;
        for (Eigen::Index j = 0; j < report.matrix.cols(); ++j) {
            const double v = report.matrix(i, j);
            out << ',';
            if (std::isnan(v)) {
                out << "NA";
            } else {
                out << v;
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace qprior
