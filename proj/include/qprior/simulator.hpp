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
 * Noisy shot sampling: stochastic-Pauli trajectories, alias-table sampling
 * and readout flips.
 *
 * One trajectory is one noise realization of the circuit. Its Pauli
 * injections come from the Noise stream seeded with `noise_seed ^ t`, its
 * shots from the Sampling stream of `sample_seed` at index t, and its readout
 * flips from the Readout stream of `noise_seed` at index t. Trajectories are
 * therefore independent and may run on any number of threads; results are
 * written in trajectory order.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qprior/circuit.hpp"
#include "qprior/errors.hpp"
#include "qprior/rng.hpp"
#include "qprior/statevector.hpp"

namespace qprior {

struct NoiseModel {
    /// Per-qubit P(read 1 | ideal 0). Empty means zero on every qubit.
    std::vector<double> readout_p01;
    /// Per-qubit P(read 0 | ideal 1). Empty means zero on every qubit.
    std::vector<double> readout_p10;
    /// Probability of a uniformly random X/Y/Z after a gate, per qubit touched.
    double pauli_p = 0.0;
    std::uint64_t noise_seed = 0;

    static NoiseModel uniform(int n_qubits, double pauli_p, double p01,
                              double p10, std::uint64_t noise_seed) {
        NoiseModel model;
        model.pauli_p = pauli_p;
        model.noise_seed = noise_seed;
        model.readout_p01.assign(static_cast<std::size_t>(n_qubits), p01);
        model.readout_p10.assign(static_cast<std::size_t>(n_qubits), p10);
        return model;
    }

    [[nodiscard]] bool has_gate_noise() const noexcept { return pauli_p > 0.0; }

    [[nodiscard]] bool has_readout_noise() const noexcept {
        auto positive = [](double p) { return p > 0.0; };
        return std::any_of(readout_p01.begin(), readout_p01.end(), positive) ||
               std::any_of(readout_p10.begin(), readout_p10.end(), positive);
    }

    friend bool operator==(const NoiseModel &, const NoiseModel &) = default;
};

/**
 * Named noise levels used by the CLI, calibrated on the default depth-65
 * circuit:
 *
 *     none  pauli_p 0       readout 0
 *     low   pauli_p 1e-4    readout 0.01   correlations reduced, still strong
 *     high  pauli_p 5e-4    readout 0.03   near-uniform histogram, weak residue
 */
inline NoiseModel noise_preset(const std::string &name, std::uint64_t noise_seed,
                               int n_qubits = kDefaultQubits) {
    if (name == "none") {
        return NoiseModel::uniform(n_qubits, 0.0, 0.0, 0.0, noise_seed);
    }
    if (name == "low") {
        return NoiseModel::uniform(n_qubits, 1e-4, 0.01, 0.01, noise_seed);
    }
    if (name == "high") {
        return NoiseModel::uniform(n_qubits, 5e-4, 0.03, 0.03, noise_seed);
    }
    throw InvalidArgument("unknown noise preset '" + name + "' (expected none, low or high)");
}

inline void validate_noise(const NoiseModel &noise, int n_qubits) {
    auto is_probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    require(is_probability(noise.pauli_p), "noise: pauli_p must lie in [0, 1]");
    for (const auto *vec : {&noise.readout_p01, &noise.readout_p10}) {
        require(vec->empty() || vec->size() == static_cast<std::size_t>(n_qubits),
                "noise: readout vectors must be empty or have one entry per qubit");
        require(std::all_of(vec->begin(), vec->end(), is_probability),
                "noise: readout probabilities must lie in [0, 1]");
    }
}

struct ShotBatch {
    int n_qubits = kDefaultQubits;
    /// Bit q of each word is the outcome of qubit q.
    std::vector<std::uint16_t> words;
};

/**
 * Walker/Vose alias table over 2^k outcomes.
 *
 * One 64-bit draw per sample: the top k bits pick a column, the remaining
 * bits are the acceptance coin.
 */
class AliasTable {
  public:
    explicit AliasTable(std::span<const double> weights) { rebuild(weights); }
    AliasTable() = default;

    void rebuild(std::span<const double> weights) {
        const std::size_t n = weights.size();
        require(n >= 1 && (n & (n - 1)) == 0 && n <= (std::size_t{1} << 32),
                "AliasTable: size must be a power of two");
        double total = 0.0;
        for (double w : weights) {
            require(w >= 0.0, "AliasTable: negative weight");
            total += w;
        }
        require(total > 0.0, "AliasTable: weights sum to zero");

        bits_ = 0;
        while ((std::size_t{1} << bits_) < n) {
            ++bits_;
        }
        threshold_.assign(n, ~std::uint64_t{0});
        alias_.resize(n);
        scaled_.resize(n);
        small_.clear();
        large_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            alias_[i] = static_cast<std::uint32_t>(i);
            scaled_[i] = weights[i] * static_cast<double>(n) / total;
            (scaled_[i] < 1.0 ? small_ : large_).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small_.empty() && !large_.empty()) {
            const auto lo = small_.back();
            small_.pop_back();
            const auto hi = large_.back();
            large_.pop_back();
            threshold_[lo] = bernoulli_threshold(scaled_[lo]);
            alias_[lo] = hi;
            scaled_[hi] = (scaled_[hi] + scaled_[lo]) - 1.0;
            (scaled_[hi] < 1.0 ? small_ : large_).push_back(hi);
        }
        // Leftovers are 1 up to rounding; they keep threshold max and alias self.
    }

    [[nodiscard]] std::size_t size() const noexcept { return alias_.size(); }

    std::uint32_t sample(Rng &rng) const noexcept {
        const std::uint64_t r = rng.next();
        if (bits_ == 0) {
            return 0;
        }
        const auto column = static_cast<std::uint32_t>(r >> (64 - bits_));
        const std::uint64_t coin = r << bits_;
        return coin < threshold_[column] ? column : alias_[column];
    }

  private:
    int bits_ = 0;
    std::vector<std::uint64_t> threshold_;
    std::vector<std::uint32_t> alias_;
    std::vector<double> scaled_;
    std::vector<std::uint32_t> small_;
    std::vector<std::uint32_t> large_;
};

/**
 * Executes one noise realization of `circuit` into `state`.
 *
 * Runs of single-qubit gates (and injected Paulis) are fused per qubit and
 * folded into the next ECR on that qubit, so each ECR costs one 4x4 pass.
 * The result equals gate-by-gate application up to rounding.
 */
inline void run_trajectory(const Circuit &circuit, const NoiseModel &noise,
                           std::uint64_t trajectory, StateVector &state) {
    require(state.n_qubits() == circuit.n_qubits,
            "run_trajectory: qubit count mismatch");
    state.reset();
    const auto n = static_cast<std::size_t>(circuit.n_qubits);
    std::vector<Mat2> pending(n, kIdentity2);
    std::vector<bool> dirty(n, false);

    const bool noisy = noise.has_gate_noise();
    const std::uint64_t threshold = bernoulli_threshold(noise.pauli_p);
    Rng rng = Rng::stream(noise.noise_seed ^ trajectory, Purpose::Noise);
    auto inject = [&](int q) {
        if (!noisy) {
            return;
        }
        if (rng.next() < threshold) {
            const auto p = static_cast<Pauli>(1 + rng.below(3));
            auto &m = pending[static_cast<std::size_t>(q)];
            m = matmul(pauli_matrix(p), m);
            dirty[static_cast<std::size_t>(q)] = true;
        }
    };

    for (const auto &gate : circuit.gates) {
        if (is_two_qubit(gate.kind)) {
            const auto a = static_cast<std::size_t>(gate.q0);
            const auto b = static_cast<std::size_t>(gate.q1);
            Mat4 m = ecr_matrix();
            if (dirty[a] || dirty[b]) {
                m = matmul(m, kron_local(pending[a], pending[b]));
                pending[a] = pending[b] = kIdentity2;
                dirty[a] = dirty[b] = false;
            }
            state.apply(m, gate.q0, gate.q1);
            inject(gate.q0);
            inject(gate.q1);
        } else {
            auto &m = pending[static_cast<std::size_t>(gate.q0)];
            m = matmul(single_qubit_matrix(gate), m);
            dirty[static_cast<std::size_t>(gate.q0)] = true;
            inject(gate.q0);
        }
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (dirty[q]) {
            state.apply(pending[q], static_cast<int>(q));
        }
    }
}

struct SampleOptions {
    /// Worker threads; 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

namespace detail {

inline void apply_readout(std::span<std::uint16_t> words, const NoiseModel &noise,
                          int n_qubits, std::uint64_t trajectory) {
    std::vector<std::uint64_t> t01(static_cast<std::size_t>(n_qubits), 0);
    std::vector<std::uint64_t> t10(static_cast<std::size_t>(n_qubits), 0);
    for (std::size_t q = 0; q < t01.size(); ++q) {
        if (!noise.readout_p01.empty()) {
            t01[q] = bernoulli_threshold(noise.readout_p01[q]);
        }
        if (!noise.readout_p10.empty()) {
            t10[q] = bernoulli_threshold(noise.readout_p10[q]);
        }
    }
    Rng rng = Rng::stream(noise.noise_seed, Purpose::Readout, trajectory);
    for (auto &word : words) {
        std::uint16_t flips = 0;
        for (int q = 0; q < n_qubits; ++q) {
            const bool one = ((word >> q) & 1U) != 0;
            const auto threshold = one ? t10[static_cast<std::size_t>(q)]
                                       : t01[static_cast<std::size_t>(q)];
            if (rng.next() < threshold) {
                flips = static_cast<std::uint16_t>(flips | (1U << q));
            }
        }
        word = static_cast<std::uint16_t>(word ^ flips);
    }
}

/// Runs `task(index)` for index in [0, count) on up to `threads` workers.
/// The first exception thrown by any task is rethrown.
template <typename Task>
void parallel_for(std::uint64_t count, unsigned threads, Task &&task) {
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            try {
                for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    task(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
            }
        });
    }
    workers.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace detail

/**
 * Draws `n_shots` measurement words split evenly over `n_trajectories`
 * noise realizations. Without gate noise every trajectory shares one
 * statevector, so the circuit is simulated once.
 */
inline ShotBatch sample_shots(const Circuit &circuit, const NoiseModel &noise,
                              std::uint64_t n_shots, std::uint64_t n_trajectories,
                              std::uint64_t sample_seed, SampleOptions options = {}) {
    validate_circuit(circuit);
    validate_noise(noise, circuit.n_qubits);
    require(n_shots > 0, "sample_shots: n_shots must be positive");
    require(n_trajectories > 0, "sample_shots: n_trajectories must be positive");
    require(n_shots % n_trajectories == 0,
            "sample_shots: n_shots must be divisible by n_trajectories");

    const std::uint64_t per_trajectory = n_shots / n_trajectories;
    ShotBatch batch;
    batch.n_qubits = circuit.n_qubits;
    batch.words.resize(n_shots);

    AliasTable shared;
    if (!noise.has_gate_noise()) {
        StateVector state(circuit.n_qubits);
        run_trajectory(circuit, noise, 0, state);
        shared.rebuild(probabilities(state));
    }
    const bool readout = noise.has_readout_noise();

    detail::parallel_for(n_trajectories, options.threads, [&](std::uint64_t t) {
        std::span<std::uint16_t> out(batch.words.data() + t * per_trajectory,
                                     per_trajectory);
        const AliasTable *table = &shared;
        AliasTable local;
        if (noise.has_gate_noise()) {
            StateVector state(circuit.n_qubits);
            run_trajectory(circuit, noise, t, state);
            local.rebuild(probabilities(state));
            table = &local;
        }
        Rng rng = Rng::stream(sample_seed, Purpose::Sampling, t);
        for (auto &word : out) {
            word = static_cast<std::uint16_t>(table->sample(rng));
        }
        if (readout) {
            detail::apply_readout(out, noise, circuit.n_qubits, t);
        }
    });
    return batch;
}

}  // namespace qprior
