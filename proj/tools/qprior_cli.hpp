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

// Command-line front end. Kept in a header so the test suite can drive it
// in-process through run_cli().

#pragma once

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qprior/qprior.hpp"

namespace qprior::cli {

using nlohmann::json;

/// Sub-seed slots under the master seed. Frozen: renumbering changes every
/// artifact produced without explicit per-stage seeds.
enum class SeedRole : std::uint64_t {
    Angles = 1,
    Noise = 2,
    Sample = 3,
    Classical = 4,
    Shuffle = 5,
    Projection = 6,
    Gaussian = 7,
};

inline std::uint64_t derive_sub_seed(std::uint64_t master, SeedRole role) {
    return derive_seed(master, Purpose::Master, static_cast<std::uint64_t>(role));
}

/// A seed that is either given on the command line or derived from --seed.
struct SeedArg {
    std::optional<std::uint64_t> value;

    [[nodiscard]] std::uint64_t resolve(std::uint64_t master, SeedRole role) const {
        return value ? *value : derive_sub_seed(master, role);
    }
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

/// "out.qlat" + 0.25 -> "out_alpha0.25.qlat".
inline std::string grid_path(const std::string &path, double alpha) {
    const std::filesystem::path p(path);
    auto name = p.stem().string() + "_alpha" + format_number(alpha) + p.extension().string();
    return (p.parent_path() / name).string();
}

inline bool has_magic(const std::string &path, std::string_view magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string head(magic.size(), '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    return in.gcount() == static_cast<std::streamsize>(magic.size()) && head == magic;
}

inline void write_text(const std::string &path, const std::string &text) {
    io::write_file(path, text);
}

struct GenPoolArgs {
    std::string noise = "none";
    std::optional<double> pauli_p;
    std::optional<double> readout_p01;
    std::optional<double> readout_p10;
    std::uint64_t shots = 20000;
    std::uint64_t repeats = 1024;
    int depth = 65;
    std::string circuit_path;
    std::string save_circuit;
    std::string label;
    SeedArg angle_seed, noise_seed, sample_seed;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool stamp_time = false;
    std::string output;
};

struct GenClassicalArgs {
    std::uint64_t shots = 20480000;
    SeedArg class_seed;
    std::uint64_t seed = 0;
    bool stamp_time = false;
    std::string output;
};

struct MergeArgs {
    std::vector<std::string> inputs;
    SeedArg shuffle_seed;
    std::uint64_t seed = 0;
    bool stamp_time = false;
    std::string output;
};

struct StatsArgs {
    std::string input;
    std::string csv;
    bool histogram = false;
};

struct LatentArgs {
    std::string pool;
    std::size_t shots_per_sample = 16;
    std::size_t z_dim = 128;
    std::size_t batch = 65536;
    double alpha = 1.0;
    std::vector<double> alpha_grid;
    std::string mode = "centered";
    double clamp_eps = 1e-6;
    bool strict = false;
    std::uint64_t start = 0;
    SeedArg proj_seed, class_seed;
    std::uint64_t seed = 0;
    std::string output;
};

struct SweepArgs {
    int depth = 4;
    std::vector<double> pauli_grid = {0.0, 0.002, 0.01, 0.05};
    double readout = 0.01;
    std::uint64_t shots = 4000;
    std::uint64_t repeats = 256;
    SeedArg angle_seed, noise_seed, sample_seed;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string output;
};

struct CircuitArgs {
    int depth = 65;
    SeedArg angle_seed;
    std::uint64_t seed = 0;
    std::string output;
};

inline void add_seed_option(CLI::App *app, const std::string &name, SeedArg &arg,
                            const std::string &help) {
    app->add_option(name, arg.value, help + " (default: derived from --seed)");
}

inline void add_master_seed(CLI::App *app, std::uint64_t &seed) {
    app->add_option("--seed", seed, "Master seed for every derived sub-seed")
        ->envname("QPRIOR_SEED")
        ->capture_default_str();
}

inline int cmd_gen_pool(const GenPoolArgs &a, std::ostream &out) {
    const auto angle_seed = a.angle_seed.resolve(a.seed, SeedRole::Angles);
    const auto noise_seed = a.noise_seed.resolve(a.seed, SeedRole::Noise);
    const auto sample_seed = a.sample_seed.resolve(a.seed, SeedRole::Sample);

    Circuit circuit = a.circuit_path.empty() ? build_default_circuit(angle_seed, a.depth)
                                             : load_circuit(a.circuit_path);
    NoiseModel noise = noise_preset(a.noise, noise_seed, circuit.n_qubits);
    if (a.pauli_p) {
        noise.pauli_p = *a.pauli_p;
    }
    if (a.readout_p01) {
        noise.readout_p01.assign(static_cast<std::size_t>(circuit.n_qubits), *a.readout_p01);
    }
    if (a.readout_p10) {
        noise.readout_p10.assign(static_cast<std::size_t>(circuit.n_qubits), *a.readout_p10);
    }
    if (!a.save_circuit.empty()) {
        save_circuit(circuit, a.save_circuit);
    }
    auto pool = generate_quantum_pool(circuit, noise, a.shots, a.repeats, sample_seed, a.label,
                                      {.threads = a.threads});
    auto &cfg = pool.metadata.config;
    cfg["command"] = "gen-pool";
    cfg["noise_preset"] = a.noise;
    cfg["shots"] = a.shots;
    cfg["repeats"] = a.repeats;
    cfg["master_seed"] = a.seed;
    if (a.circuit_path.empty()) {
        cfg["depth_target"] = a.depth;
    } else {
        cfg["circuit_file"] = a.circuit_path;
    }
    if (a.stamp_time) {
        pool.metadata.created_at = utc_timestamp();
    }
    save_pool(pool, a.output);
    out << json{{"output", a.output}, {"metadata", to_json(pool.metadata)}}.dump(2) << '\n';
    return 0;
}

inline int cmd_gen_classical(const GenClassicalArgs &a, std::ostream &out) {
    const auto class_seed = a.class_seed.resolve(a.seed, SeedRole::Classical);
    auto pool = generate_classical_pool(a.shots, class_seed);
    pool.metadata.config = {{"command", "gen-classical"}, {"shots", a.shots},
                            {"master_seed", a.seed}};
    if (a.stamp_time) {
        pool.metadata.created_at = utc_timestamp();
    }
    save_pool(pool, a.output);
    out << json{{"output", a.output}, {"metadata", to_json(pool.metadata)}}.dump(2) << '\n';
    return 0;
}

inline int cmd_merge(const MergeArgs &a, std::ostream &out) {
    const auto shuffle_seed = a.shuffle_seed.resolve(a.seed, SeedRole::Shuffle);
    const auto first = load_pool(a.inputs[0]);
    const auto second = load_pool(a.inputs[1]);
    auto merged = merge_pools(first, second, shuffle_seed);
    merged.metadata.config = {{"command", "merge"}, {"inputs", a.inputs},
                              {"master_seed", a.seed}};
    if (a.stamp_time) {
        merged.metadata.created_at = utc_timestamp();
    }
    save_pool(merged, a.output);
    out << json{{"output", a.output}, {"metadata", to_json(merged.metadata)}}.dump(2) << '\n';
    return 0;
}

inline int cmd_stats(const StatsArgs &a, std::ostream &out) {
    json report;
    if (has_magic(a.input, {kLatentMagic, sizeof kLatentMagic})) {
        const auto batch = import_latents(a.input);
        const auto corr = correlation_report(batch.values);
        report = {{"kind", "latents"},
                  {"B", batch.values.rows()},
                  {"z_dim", batch.values.cols()},
                  {"alpha", batch.alpha},
                  {"provenance", batch.provenance},
                  {"report", to_json(latent_report(batch))},
                  {"correlation",
                   {{"offdiag_abs_mean", corr.offdiag_abs_mean},
                    {"offdiag_abs_std", corr.offdiag_abs_std},
                    {"n_pairs", corr.n_pairs}}}};
        if (!a.csv.empty()) {
            write_text(a.csv, correlation_csv(corr));
        }
    } else {
        const auto pool = load_pool(a.input);
        const auto corr = correlation_report(pool);
        report = {{"kind", "pool"},
                  {"metadata", to_json(pool.metadata)},
                  {"stats", to_json(pool_stats(pool), a.histogram)},
                  {"correlation", to_json(corr)}};
        if (!a.csv.empty()) {
            write_text(a.csv, correlation_csv(corr));
        }
    }
    out << report.dump(2) << '\n';
    return 0;
}

inline int cmd_latents(const LatentArgs &a, std::ostream &out) {
    std::vector<double> alphas = a.alpha_grid.empty() ? std::vector<double>{a.alpha} : a.alpha_grid;
    const bool needs_pool = std::any_of(alphas.begin(), alphas.end(), [](double x) { return x > 0; });
    if (needs_pool && a.pool.empty()) {
        throw InvalidArgument("latents: --pool is required when alpha > 0");
    }
    const auto proj_seed = a.proj_seed.resolve(a.seed, SeedRole::Projection);
    const auto class_seed = a.class_seed.resolve(a.seed, SeedRole::Gaussian);
    EncodingConfig enc{a.shots_per_sample, encoding_mode_from_string(a.mode), a.clamp_eps};
    validate_encoding(enc);

    json provenance = {{"command", "latents"},
                       {"B", a.batch},
                       {"z_dim", a.z_dim},
                       {"S", a.shots_per_sample},
                       {"mode", a.mode},
                       {"clamp_epsilon", a.clamp_eps},
                       {"cursor_policy", a.strict ? "strict" : "wrap"},
                       {"master_seed", a.seed},
                       {"proj_seed", proj_seed},
                       {"class_seed", class_seed}};

    const Matrix z_class = sample_classical_latents(a.batch, a.z_dim, class_seed);
    Matrix z_quant;
    if (needs_pool) {
        const auto pool = load_pool(a.pool);
        if (a.start >= pool.size()) {
            throw InvalidArgument("latents: --start must be below the pool size");
        }
        PoolCursor cursor{a.start, 0};
        z_quant = sample_quantum_latents(pool, cursor, a.batch, enc, make_projection(a.z_dim, proj_seed),
                                         a.strict ? CursorPolicy::Strict : CursorPolicy::Wrap);
        provenance["pool_file"] = a.pool;
        provenance["source_label"] = pool.metadata.source_label;
        provenance["pool_seeds"] = pool.metadata.seeds;
        provenance["cursor"] = {{"start", a.start},
                                {"end", cursor.position},
                                {"wrap_count", cursor.wrap_count}};
    } else {
        z_quant = Matrix::Zero(z_class.rows(), z_class.cols());
        provenance["source_label"] = "classical-only";
    }

    json written = json::array();
    for (double alpha : alphas) {
        LatentBatch batch;
        batch.values = hybrid(z_quant, z_class, alpha);
        batch.alpha = alpha;
        batch.provenance = provenance;
        const auto path = a.alpha_grid.empty() ? a.output : grid_path(a.output, alpha);
        export_latents(batch, path);
        written.push_back({{"output", path}, {"alpha", alpha}});
    }
    out << json{{"files", written}, {"provenance", provenance}}.dump(2) << '\n';
    return 0;
}

inline int cmd_sweep(const SweepArgs &a, std::ostream &out) {
    const auto angle_seed = a.angle_seed.resolve(a.seed, SeedRole::Angles);
    const auto noise_seed = a.noise_seed.resolve(a.seed, SeedRole::Noise);
    const auto sample_seed = a.sample_seed.resolve(a.seed, SeedRole::Sample);
    const auto circuit = build_default_circuit(angle_seed, a.depth);
    std::vector<NoiseModel> grid;
    for (double p : a.pauli_grid) {
        grid.push_back(NoiseModel::uniform(circuit.n_qubits, p, a.readout, a.readout, noise_seed));
    }
    SweepConfig config{a.shots, a.repeats, sample_seed, {.threads = a.threads}};
    const auto points = noise_sweep(circuit, grid, config);
    json table = {{"config",
                   {{"depth_target", a.depth},
                    {"pauli_grid", a.pauli_grid},
                    {"readout", a.readout},
                    {"shots", a.shots},
                    {"repeats", a.repeats},
                    {"master_seed", a.seed},
                    {"angle_seed", angle_seed},
                    {"noise_seed", noise_seed},
                    {"sample_seed", sample_seed}}},
                  {"points", sweep_to_json(points)}};
    if (a.output.empty()) {
        out << table.dump(2) << '\n';
    } else {
        write_text(a.output, table.dump(2) + "\n");
        out << json{{"output", a.output}, {"points", points.size()}}.dump() << '\n';
    }
    return 0;
}

inline int cmd_circuit(const CircuitArgs &a, std::ostream &out) {
    const auto circuit = build_default_circuit(a.angle_seed.resolve(a.seed, SeedRole::Angles), a.depth);
    if (a.output.empty()) {
        out << circuit_to_text(circuit);
    } else {
        save_circuit(circuit, a.output);
    }
    return 0;
}

/// Parses argv-style arguments (program name excluded) and runs one command.
/// Exit codes: 0 success, 1 runtime error, 2 usage error.
inline int run_cli(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qprior: quantum-correlated latent priors from simulated bitstring pools"};
    app.name("qprior");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from a key=value config file");
    app.set_help_all_flag("--help-all", "Show help for every command");

    GenPoolArgs gp;
    auto *gen_pool = app.add_subcommand("gen-pool", "Simulate the circuit and write a QPOOL1 pool");
    gen_pool->add_option("--noise", gp.noise, "Noise preset")
        ->check(CLI::IsMember({"none", "low", "high"}))
        ->capture_default_str();
    gen_pool->add_option("--pauli-p", gp.pauli_p, "Override the per-gate Pauli error probability")
        ->check(CLI::Range(0.0, 1.0));
    gen_pool->add_option("--readout-p01", gp.readout_p01, "Override P(read 1 | 0) on every qubit")
        ->check(CLI::Range(0.0, 1.0));
    gen_pool->add_option("--readout-p10", gp.readout_p10, "Override P(read 0 | 1) on every qubit")
        ->check(CLI::Range(0.0, 1.0));
    gen_pool->add_option("--shots", gp.shots, "Shots per trajectory")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen_pool->add_option("--repeats", gp.repeats, "Number of trajectories")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen_pool->add_option("--depth", gp.depth, "Two-qubit depth of the default circuit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen_pool->add_option("--circuit", gp.circuit_path, "Load the circuit from a text file")
        ->check(CLI::ExistingFile);
    gen_pool->add_option("--save-circuit", gp.save_circuit, "Write the circuit used");
    gen_pool->add_option("--label", gp.label, "source_label (default: noiseless or noisy)");
    add_seed_option(gen_pool, "--angle-seed", gp.angle_seed, "Rotation-angle seed");
    add_seed_option(gen_pool, "--noise-seed", gp.noise_seed, "Pauli and readout noise seed");
    add_seed_option(gen_pool, "--sample-seed", gp.sample_seed, "Shot sampling seed");
    add_master_seed(gen_pool, gp.seed);
    gen_pool->add_option("--threads", gp.threads, "Worker threads (0: all cores)")
        ->capture_default_str();
    gen_pool->add_flag("--stamp-time", gp.stamp_time, "Record created_at in the metadata");
    gen_pool->add_option("-o,--output", gp.output, "Output pool path")->required();

    GenClassicalArgs gc;
    auto *gen_classical =
        app.add_subcommand("gen-classical", "Write a pool of independent fair bits");
    gen_classical->add_option("--shots", gc.shots, "Total shots")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_seed_option(gen_classical, "--class-seed", gc.class_seed, "Bit source seed");
    add_master_seed(gen_classical, gc.seed);
    gen_classical->add_flag("--stamp-time", gc.stamp_time, "Record created_at in the metadata");
    gen_classical->add_option("-o,--output", gc.output, "Output pool path")->required();

    MergeArgs mg;
    auto *merge = app.add_subcommand("merge", "Concatenate and shuffle two pools");
    merge->add_option("inputs", mg.inputs, "Two input pools")
        ->required()
        ->expected(2)
        ->check(CLI::ExistingFile);
    add_seed_option(merge, "--shuffle-seed", mg.shuffle_seed, "Shuffle seed");
    add_master_seed(merge, mg.seed);
    merge->add_flag("--stamp-time", mg.stamp_time, "Record created_at in the metadata");
    merge->add_option("-o,--output", mg.output, "Output pool path")->required();

    StatsArgs st;
    auto *stats = app.add_subcommand("stats", "Print a JSON report for a pool or latent file");
    stats->add_option("input", st.input, "QPOOL1 or QLAT1 file")->required()->check(CLI::ExistingFile);
    stats->add_option("--csv", st.csv, "Also write the correlation matrix as CSV");
    stats->add_flag("--histogram", st.histogram, "Include the 65536-bin histogram");

    LatentArgs lt;
    auto *latents = app.add_subcommand("latents", "Encode a pool into a QLAT1 latent batch");
    latents->add_option("--pool", lt.pool, "Input pool")->check(CLI::ExistingFile);
    latents->add_option("--S", lt.shots_per_sample, "Shots per latent sample")
        ->check(CLI::Range(1, 52))
        ->capture_default_str();
    latents->add_option("--zdim", lt.z_dim, "Latent width (>= 16)")
        ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 20))
        ->capture_default_str();
    latents->add_option("--B", lt.batch, "Batch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto *alpha_opt = latents->add_option("--alpha", lt.alpha, "Quantum mixing weight")
                          ->check(CLI::Range(0.0, 1.0))
                          ->capture_default_str();
    latents
        ->add_option("--alpha-grid", lt.alpha_grid, "Comma-separated alphas, one file per value")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(alpha_opt);
    latents->add_option("--mode", lt.mode, "Binary-fraction encoding")
        ->check(CLI::IsMember({"centered", "paper-literal"}))
        ->capture_default_str();
    latents->add_option("--clamp-eps", lt.clamp_eps, "Probability floor (paper-literal)")
        ->capture_default_str();
    latents->add_flag("--strict", lt.strict, "Fail instead of reusing pool shots");
    latents->add_option("--start", lt.start, "Cursor start position")->capture_default_str();
    add_seed_option(latents, "--proj-seed", lt.proj_seed, "Projection seed");
    add_seed_option(latents, "--class-seed", lt.class_seed, "Classical Gaussian seed");
    add_master_seed(latents, lt.seed);
    latents->add_option("-o,--output", lt.output, "Output latent path")->required();

    SweepArgs sw;
    auto *sweep = app.add_subcommand("sweep", "Pool statistics along a Pauli noise grid");
    sweep->add_option("--depth", sw.depth, "Two-qubit depth of the default circuit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--pauli-grid", sw.pauli_grid, "Comma-separated pauli_p values")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    sweep->add_option("--readout", sw.readout, "Symmetric readout flip probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sweep->add_option("--shots", sw.shots, "Shots per trajectory")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--repeats", sw.repeats, "Trajectories per grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_seed_option(sweep, "--angle-seed", sw.angle_seed, "Rotation-angle seed");
    add_seed_option(sweep, "--noise-seed", sw.noise_seed, "Noise seed");
    add_seed_option(sweep, "--sample-seed", sw.sample_seed, "Shot sampling seed");
    add_master_seed(sweep, sw.seed);
    sweep->add_option("--threads", sw.threads, "Worker threads (0: all cores)");
    sweep->add_option("-o,--output", sw.output, "Write the JSON table here instead of stdout");

    CircuitArgs ci;
    auto *circuit = app.add_subcommand("circuit", "Print or save the default circuit");
    circuit->add_option("--depth", ci.depth, "Two-qubit depth")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_seed_option(circuit, "--angle-seed", ci.angle_seed, "Rotation-angle seed");
    add_master_seed(circuit, ci.seed);
    circuit->add_option("-o,--output", ci.output, "Output path (default: stdout)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "qprior: error: " << e.what() << " (see --help)\n";
        return 2;
    }

    try {
        if (*gen_pool) {
            return cmd_gen_pool(gp, out);
        }
        if (*gen_classical) {
            return cmd_gen_classical(gc, out);
        }
        if (*merge) {
            return cmd_merge(mg, out);
        }
        if (*stats) {
            return cmd_stats(st, out);
        }
        if (*latents) {
            return cmd_latents(lt, out);
        }
        if (*sweep) {
            return cmd_sweep(sw, out);
        }
        if (*circuit) {
            return cmd_circuit(ci, out);
        }
    } catch (const std::exception &e) {
        err << "qprior: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(std::move(args), out, err);
}

}  // namespace qprior::cli
