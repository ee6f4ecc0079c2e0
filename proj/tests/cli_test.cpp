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

#include "qprior_cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gtest/gtest.h"

using namespace qprior;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qprior_cli_" + std::string(::testing::UnitTest::GetInstance()
                                                ->current_test_info()
                                                ->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv("QPRIOR_SEED");
    }
    void TearDown() override {
        fs::remove_all(dir_);
        unsetenv("QPRIOR_SEED");
    }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

void expect_usage_error(const Result &r) {
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("qprior: error: ", 0), 0U) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
}

}  // namespace

TEST_F(CliTest, GenPoolWritesExactCountAndIsReproducible) {
    const auto a = run({"gen-pool", "--shots", "200", "--repeats", "8", "--seed", "42", "-o",
                        path("a.qpool")});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto b = run({"gen-pool", "--shots", "200", "--repeats", "8", "--seed", "42", "-o",
                        path("b.qpool")});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(io::read_file(path("a.qpool")), io::read_file(path("b.qpool")));
    const auto pool = load_pool(path("a.qpool"));
    EXPECT_EQ(pool.size(), 1600U);
    EXPECT_EQ(pool.metadata.source_label, "noiseless");
    EXPECT_EQ(pool.metadata.config["master_seed"], 42U);
    EXPECT_EQ(pool.metadata.seeds["sample_seed"],
              cli::derive_sub_seed(42, cli::SeedRole::Sample));
    EXPECT_FALSE(to_json(pool.metadata).contains("created_at"));
    const auto summary = nlohmann::json::parse(a.out);
    EXPECT_EQ(summary["metadata"]["total_shots"], 1600U);
}

TEST_F(CliTest, GenPoolSeedsMatter) {
    ASSERT_EQ(run({"gen-pool", "--shots", "100", "--repeats", "2", "--seed", "1", "-o",
                   path("a.qpool")}).code, 0);
    ASSERT_EQ(run({"gen-pool", "--shots", "100", "--repeats", "2", "--seed", "2", "-o",
                   path("b.qpool")}).code, 0);
    EXPECT_NE(load_pool(path("a.qpool")).words, load_pool(path("b.qpool")).words);
}

TEST_F(CliTest, GenPoolMatchesLibraryCall) {
    ASSERT_EQ(run({"gen-pool", "--noise", "high", "--depth", "5", "--shots", "50", "--repeats",
                   "4", "--angle-seed", "3", "--noise-seed", "4", "--sample-seed", "5", "-o",
                   path("p.qpool")}).code, 0);
    const auto expected = generate_quantum_pool(build_default_circuit(3, 5),
                                                noise_preset("high", 4), 50, 4, 5);
    const auto got = load_pool(path("p.qpool"));
    EXPECT_EQ(got.words, expected.words);
    EXPECT_EQ(got.metadata.source_label, "noisy");
}

TEST_F(CliTest, GenPoolNoiseOverridesAndCircuitFile) {
    ASSERT_EQ(run({"circuit", "--depth", "3", "--angle-seed", "8", "-o", path("c.txt")}).code, 0);
    const auto r = run({"gen-pool", "--circuit", path("c.txt"), "--pauli-p", "0.01",
                        "--readout-p01", "0.02", "--shots", "10", "--repeats", "2",
                        "--save-circuit", path("copy.txt"), "-o", path("p.qpool")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(load_circuit(path("copy.txt")), build_default_circuit(8, 3));
    const auto meta = load_pool(path("p.qpool")).metadata;
    EXPECT_EQ(meta.noise_summary["pauli_p"], 0.01);
    EXPECT_EQ(meta.noise_summary["readout_p01"][0], 0.02);
    EXPECT_EQ(meta.config["circuit_file"], path("c.txt"));
}

TEST_F(CliTest, UsageErrors) {
    expect_usage_error(run({"gen-pool", "--repeats", "0", "-o", path("x.qpool")}));
    expect_usage_error(run({"gen-pool", "--shots", "10"}));
    expect_usage_error(run({"gen-pool", "--noise", "medium", "-o", path("x.qpool")}));
    expect_usage_error(run({"gen-classical", "--shots", "10"}));
    expect_usage_error(run({"latents", "--alpha", "1.5", "-o", path("x.qlat")}));
    expect_usage_error(run({"latents", "--alpha-grid", "0,2", "-o", path("x.qlat")}));
    expect_usage_error(run({"merge", path("missing.qpool"), path("missing2.qpool"), "-o",
                            path("m.qpool")}));
    expect_usage_error(run({"frobnicate"}));
    expect_usage_error(run({}));
    EXPECT_FALSE(fs::exists(path("x.qpool")));
}

TEST_F(CliTest, RuntimeErrorsAreSingleLine) {
    io::write_file(path("junk.qpool"), "not a pool at all");
    const auto r = run({"stats", path("junk.qpool")});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("qprior: error: ", 0), 0U);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    const auto missing_pool = run({"latents", "--alpha", "0.5", "-o", path("x.qlat")});
    EXPECT_EQ(missing_pool.code, 1);
    EXPECT_NE(missing_pool.err.find("--pool"), std::string::npos);
}

TEST_F(CliTest, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("gen-pool"), std::string::npos);
    EXPECT_EQ(run({"latents", "--help"}).code, 0);
}

TEST_F(CliTest, GenClassicalDeterministic) {
    ASSERT_EQ(run({"gen-classical", "--shots", "1000", "--seed", "9", "-o", path("a.qpool")}).code,
              0);
    ASSERT_EQ(run({"gen-classical", "--shots", "1000", "--seed", "9", "-o", path("b.qpool")}).code,
              0);
    EXPECT_EQ(io::read_file(path("a.qpool")), io::read_file(path("b.qpool")));
    const auto pool = load_pool(path("a.qpool"));
    EXPECT_EQ(pool.metadata.source_label, "classical");
    EXPECT_EQ(pool.words,
              generate_classical_pool(1000, cli::derive_sub_seed(9, cli::SeedRole::Classical)).words);
}

TEST_F(CliTest, MergeSumsLengthsAndRecordsParents) {
    ASSERT_EQ(run({"gen-pool", "--noise", "low", "--shots", "100", "--repeats", "4", "-o",
                   path("low.qpool")}).code, 0);
    ASSERT_EQ(run({"gen-pool", "--noise", "high", "--shots", "50", "--repeats", "4", "-o",
                   path("high.qpool")}).code, 0);
    const auto r = run({"merge", path("low.qpool"), path("high.qpool"), "--shuffle-seed", "3",
                        "-o", path("m.qpool")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto merged = load_pool(path("m.qpool"));
    EXPECT_EQ(merged.size(), 600U);
    EXPECT_EQ(merged.metadata.source_label, "merged");
    EXPECT_EQ(merged.metadata.parents.size(), 2U);
    EXPECT_EQ(merged, [&] {
        auto m = merge_pools(load_pool(path("low.qpool")), load_pool(path("high.qpool")), 3);
        m.metadata.config = merged.metadata.config;
        return m;
    }());
    // A latent file is not a pool.
    ASSERT_EQ(run({"latents", "--alpha", "0", "--B", "4", "--zdim", "16", "-o",
                   path("z.qlat")}).code, 0);
    EXPECT_EQ(run({"merge", path("low.qpool"), path("z.qlat"), "-o", path("bad.qpool")}).code, 1);
}

TEST_F(CliTest, StatsOnPoolAndCsv) {
    ASSERT_EQ(run({"gen-classical", "--shots", "5000", "-o", path("c.qpool")}).code, 0);
    const auto r = run({"stats", path("c.qpool"), "--csv", path("corr.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["kind"], "pool");
    EXPECT_EQ(j["stats"]["total_shots"], 5000U);
    EXPECT_TRUE(j["correlation"].contains("offdiag_abs_mean"));
    EXPECT_EQ(j["correlation"]["matrix"].size(), 16U);
    const auto csv = io::read_file(path("corr.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "qubit,0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
    const auto with_hist = nlohmann::json::parse(run({"stats", path("c.qpool"), "--histogram"}).out);
    EXPECT_EQ(with_hist["stats"]["histogram"].size(), 65536U);
}

TEST_F(CliTest, LatentsQuantumEndToEnd) {
    ASSERT_EQ(run({"gen-pool", "--shots", "4000", "--repeats", "32", "--seed", "5", "-o",
                   path("sim.qpool")}).code, 0);
    const auto r = run({"latents", "--pool", path("sim.qpool"), "--S", "16", "--zdim", "128",
                        "--B", "4096", "--alpha", "1.0", "--proj-seed", "7", "-o",
                        path("q.qlat")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto batch = import_latents(path("q.qlat"));
    EXPECT_EQ(batch.values.rows(), 4096);
    EXPECT_EQ(batch.values.cols(), 128);
    EXPECT_EQ(batch.alpha, 1.0);
    EXPECT_LE(latent_report(batch).rank_above(1e-6), 16U);
    EXPECT_EQ(batch.provenance["proj_seed"], 7U);
    EXPECT_EQ(batch.provenance["cursor"]["end"], 65536U);
    EXPECT_EQ(batch.provenance["source_label"], "noiseless");

    // Same values as the library pipeline, rounded to binary32.
    const auto pool = load_pool(path("sim.qpool"));
    PoolCursor cursor;
    const Matrix expected =
        sample_quantum_latents(pool, cursor, 4096, {}, make_projection(128, 7));
    EXPECT_TRUE((batch.values.array() == expected.cast<float>().cast<double>().array()).all());

    const auto s = nlohmann::json::parse(run({"stats", path("q.qlat")}).out);
    EXPECT_EQ(s["kind"], "latents");
    EXPECT_EQ(s["z_dim"], 128);
    EXPECT_LE(s["report"]["rank_above_1e-6"].get<int>(), 16);
}

TEST_F(CliTest, LatentsStrictModeExhaustion) {
    ASSERT_EQ(run({"gen-classical", "--shots", "100", "-o", path("c.qpool")}).code, 0);
    EXPECT_EQ(run({"latents", "--pool", path("c.qpool"), "--B", "7", "--zdim", "16", "--strict",
                   "-o", path("x.qlat")}).code, 1);
    EXPECT_EQ(run({"latents", "--pool", path("c.qpool"), "--B", "6", "--zdim", "16", "--strict",
                   "-o", path("x.qlat")}).code, 0);
}

TEST_F(CliTest, AlphaZeroIsClassicalSampling) {
    ASSERT_EQ(run({"gen-classical", "--shots", "320000", "-o", path("c.qpool")}).code, 0);
    ASSERT_EQ(run({"latents", "--pool", path("c.qpool"), "--zdim", "16", "--B", "20000",
                   "--alpha", "0", "--class-seed", "11", "-o", path("z.qlat")}).code, 0);
    const auto batch = import_latents(path("z.qlat"));
    const Matrix expected = sample_classical_latents(20000, 16, 11);
    EXPECT_TRUE((batch.values.array() == expected.cast<float>().cast<double>().array()).all());
    // Per-dimension KS against N(0, 1) at the 99.9% asymptotic level.
    for (Eigen::Index c = 0; c < 16; ++c) {
        std::vector<double> col(static_cast<std::size_t>(batch.values.rows()));
        for (Eigen::Index r = 0; r < batch.values.rows(); ++r) {
            col[static_cast<std::size_t>(r)] = batch.values(r, c);
        }
        EXPECT_LT(ks_statistic_normal(col), 1.95 / std::sqrt(20000.0)) << c;
    }
}

TEST_F(CliTest, AlphaGridWritesOneFilePerPoint) {
    ASSERT_EQ(run({"gen-classical", "--shots", "16000", "-o", path("c.qpool")}).code, 0);
    const auto r = run({"latents", "--pool", path("c.qpool"), "--zdim", "16", "--B", "1000",
                        "--alpha-grid", "0,0.25,0.5,0.75,1.0", "-o", path("z.qlat")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto z0 = import_latents(path("z_alpha0.qlat"));
    const auto z1 = import_latents(path("z_alpha1.qlat"));
    for (const char *name : {"z_alpha0.25.qlat", "z_alpha0.5.qlat", "z_alpha0.75.qlat"}) {
        EXPECT_TRUE(fs::exists(path(name))) << name;
    }
    const auto mid = import_latents(path("z_alpha0.5.qlat"));
    EXPECT_EQ(mid.alpha, 0.5);
    EXPECT_EQ(z0.alpha, 0.0);
    EXPECT_LT((mid.values - 0.5 * (z0.values + z1.values)).cwiseAbs().maxCoeff(), 1e-6);
    expect_usage_error(run({"latents", "--alpha", "0.5", "--alpha-grid", "0,1", "-o",
                            path("y.qlat")}));
}

TEST_F(CliTest, ConfigFileAndPrecedence) {
    io::write_file(path("run.ini"),
                   "# qprior config\n[gen-pool]\nshots=50\nrepeats=2\nseed=42\nnoise=low\n");
    ASSERT_EQ(run({"--config", path("run.ini"), "gen-pool", "-o", path("a.qpool")}).code, 0);
    auto meta = load_pool(path("a.qpool")).metadata;
    EXPECT_EQ(meta.total_shots, 100U);
    EXPECT_EQ(meta.config["master_seed"], 42U);
    EXPECT_EQ(meta.config["noise_preset"], "low");

    // Flags beat the file; the file beats the environment.
    setenv("QPRIOR_SEED", "7", 1);
    ASSERT_EQ(run({"gen-pool", "--config", path("run.ini"), "--shots", "10", "-o",
                   path("b.qpool")}).code, 0);
    meta = load_pool(path("b.qpool")).metadata;
    EXPECT_EQ(meta.total_shots, 20U);
    EXPECT_EQ(meta.config["master_seed"], 42U);
}

TEST_F(CliTest, EnvironmentSeedFallback) {
    setenv("QPRIOR_SEED", "42", 1);
    ASSERT_EQ(run({"gen-pool", "--shots", "20", "--repeats", "2", "-o", path("env.qpool")}).code,
              0);
    unsetenv("QPRIOR_SEED");
    ASSERT_EQ(run({"gen-pool", "--shots", "20", "--repeats", "2", "--seed", "42", "-o",
                   path("flag.qpool")}).code, 0);
    EXPECT_EQ(io::read_file(path("env.qpool")), io::read_file(path("flag.qpool")));
}

TEST_F(CliTest, StampTimeAddsCreatedAt) {
    ASSERT_EQ(run({"gen-classical", "--shots", "10", "--stamp-time", "-o", path("t.qpool")}).code,
              0);
    const auto created = load_pool(path("t.qpool")).metadata.created_at;
    EXPECT_EQ(created.size(), 20U);
    EXPECT_EQ(created.back(), 'Z');
}

TEST_F(CliTest, SweepEmitsTable) {
    const auto r = run({"sweep", "--depth", "2", "--shots", "200", "--repeats", "4",
                        "--pauli-grid", "0,0.01,0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["points"].size(), 3U);
    EXPECT_EQ(j["config"]["pauli_grid"][2], 0.05);
    EXPECT_EQ(run({"sweep", "--pauli-grid", "0.01"}).code, 1);
    ASSERT_EQ(run({"sweep", "--depth", "2", "--shots", "10", "--repeats", "2", "-o",
                   path("s.json")}).code, 0);
    EXPECT_EQ(nlohmann::json::parse(io::read_file(path("s.json")))["points"].size(), 4U);
}

TEST_F(CliTest, CircuitCommand) {
    const auto r = run({"circuit", "--depth", "2", "--angle-seed", "4"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(circuit_from_text(r.out), build_default_circuit(4, 2));
}

TEST(GridPath, InsertsAlphaBeforeExtension) {
    EXPECT_EQ(cli::grid_path("out/z.qlat", 0.25), "out/z_alpha0.25.qlat");
    EXPECT_EQ(cli::grid_path("z", 1.0), "z_alpha1");
}
