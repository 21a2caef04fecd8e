// Copyright 2026 Tempest Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tempest/io.hpp"
#include "tempest/reference.hpp"
#include "tempest/rng.hpp"
#include "tempest/sampling.hpp"
#include "tempest/topology.hpp"

using namespace tempest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tempest-io-" + std::to_string(Xoshiro256pp(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format17 round-trips doubles losslessly") {
    for (double v : {1.0 / 3.0, 3.54, -0.7615941559557649, 1e-300, 12345.678901234567}) {
        CHECK(std::stod(format17(v)) == v);
    }
}

TEST_CASE("instance files round-trip the model and its topology") {
    TempDir dir;
    const ChimeraSpec spec{2, 2, 4, {3}, {{8, 12}}};
    const TopologyGraph graph = build_chimera(spec);
    const IsingModel model = gen_ac3(graph, 99);
    const fs::path path = dir.path / "instance.json";
    write_instance(path, model, &spec);
    const LoadedInstance loaded = read_instance(path);
    CHECK(loaded.model.n_spins() == model.n_spins());
    CHECK(loaded.model.content_hash() == model.content_hash());
    CHECK(loaded.model.metadata().label == model.metadata().label);
    CHECK(loaded.model.metadata().generator == "ac3");
    CHECK(loaded.model.metadata().seed == 99);
    REQUIRE(loaded.topology.has_value());
    CHECK(loaded.topology->rows == 2);
    CHECK(loaded.topology->dead_qubits == std::vector<int>{3});
    CHECK(loaded.topology->dead_couplers == std::vector<std::pair<int, int>>{{8, 12}});
    CHECK_THROWS(read_instance(dir.path / "missing.json"));
}

TEST_CASE("instance files carry sparse fields") {
    TempDir dir;
    const IsingModel model(3, {{0, 2, 0.5}}, {0.0, -1.25, 0.0},
                           {"fields", "manual", 1});
    const fs::path path = dir.path / "f.json";
    write_instance(path, model);
    const LoadedInstance loaded = read_instance(path);
    CHECK(loaded.model.fields()[0] == 0.0);
    CHECK(loaded.model.fields()[1] == -1.25);
    CHECK_FALSE(loaded.topology.has_value());
}

TEST_CASE("sample sets round-trip through csv and the packed bitmap") {
    TempDir dir;
    Xoshiro256pp rng(7);
    // a few random shapes, both formats, exercising the padding
    for (int n_spins : {1, 7, 8, 9, 32}) {
        SampleSet samples("model-x", n_spins,
                          SampleMeta{"sta", "linear(0,2,10)", 42,
                                     PostProcessRecord{1.5, 2}});
        const int n = 17;
        for (int k = 0; k < n; ++k) {
            SpinState s(n_spins);
            for (auto& v : s) v = static_cast<std::int8_t>(rng.next_spin());
            samples.append(s);
        }
        for (const char* name : {"s.csv", "s.bin"}) {
            const fs::path path = dir.path / name;
            write_samples(path, samples);
            const SampleSet back = read_samples(path);
            CHECK(back.raw() == samples.raw());
            CHECK(back.n_spins() == n_spins);
            CHECK(back.model_label() == "model-x");
            CHECK(back.meta().sampler == "sta");
            CHECK(back.meta().schedule_summary == "linear(0,2,10)");
            CHECK(back.meta().seed == 42);
            REQUIRE(back.meta().postprocess.has_value());
            CHECK(back.meta().postprocess->beta == 1.5);
            CHECK(back.meta().postprocess->sweeps == 2);
        }
    }
}

TEST_CASE("malformed sample files are rejected") {
    TempDir dir;
    {
        std::ofstream out(dir.path / "ragged.csv");
        out << "+1,-1\n+1,-1,+1\n";
    }
    CHECK_THROWS(read_samples_csv(dir.path / "ragged.csv"));
    {
        std::ofstream out(dir.path / "values.csv");
        out << "+1,-1\n+1,0\n";
    }
    CHECK_THROWS(read_samples_csv(dir.path / "values.csv"));
    {
        std::ofstream out(dir.path / "bad.bin", std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS(read_samples_binary(dir.path / "bad.bin"));
}

TEST_CASE("reference statistics round-trip, with and without standard errors") {
    TempDir dir;
    const IsingModel model = gen_ran1(build_chimera({1, 1, 4, {}, {}}), 5);
    const auto exact = exact_stats_enumeration(model, {0.0, 0.7, 1.9});
    const fs::path path = dir.path / (reference_cache_stem(exact) + std::string(".json"));
    write_reference(path, exact);
    const auto back = read_reference(path);
    CHECK(back.method == RefMethod::exact_enum);
    CHECK(back.model_hash == exact.model_hash);
    REQUIRE(back.beta_grid.size() == exact.beta_grid.size());
    for (std::size_t b = 0; b < exact.beta_grid.size(); ++b) {
        CHECK(back.beta_grid[b] == exact.beta_grid[b]);
        CHECK(back.mean_energy[b] == exact.mean_energy[b]);
        CHECK(back.log_z[b] == exact.log_z[b]);
        for (std::size_t e = 0; e < exact.edges.size(); ++e)
            CHECK(back.edge_correlations[b][e] == exact.edge_correlations[b][e]);
    }
    CHECK(back.mean_energy_se.empty());

    PtStatsOptions options;
    options.rounds = 200;
    const auto pt = pt_stats(model, {0.5, 1.0}, options, 3);
    const fs::path pt_path = dir.path / "pt_ref.json";
    write_reference(pt_path, pt);
    const auto pt_back = read_reference(pt_path);
    CHECK(pt_back.method == RefMethod::pt);
    REQUIRE_FALSE(pt_back.mean_energy_se.empty());
    CHECK(pt_back.mean_energy_se[0] == pt.mean_energy_se[0]);
    CHECK(pt_back.corr_se[1][2] == pt.corr_se[1][2]);
    CHECK(pt_back.log_z_se[1] == pt.log_z_se[1]);
}

TEST_CASE("atomic writes leave no temp files behind") {
    TempDir dir;
    const fs::path path = dir.path / "sub" / "file.txt";
    atomic_write(path, "payload");
    CHECK(fs::exists(path));
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    std::ifstream in(path);
    std::string content;
    std::getline(in, content);
    CHECK(content == "payload");
}

TEST_CASE("reference cache stems key on model, grid and method") {
    const IsingModel a = gen_ran1(build_chimera({1, 1, 4, {}, {}}), 5);
    const IsingModel b = gen_ran1(build_chimera({1, 1, 4, {}, {}}), 6);
    const std::vector<double> grid{0.0, 1.0};
    CHECK(reference_cache_stem(a.content_hash(), grid, RefMethod::exact_dp) ==
          reference_cache_stem(a.content_hash(), grid, RefMethod::exact_dp));
    CHECK(reference_cache_stem(a.content_hash(), grid, RefMethod::exact_dp) !=
          reference_cache_stem(b.content_hash(), grid, RefMethod::exact_dp));
    CHECK(reference_cache_stem(a.content_hash(), grid, RefMethod::exact_dp) !=
          reference_cache_stem(a.content_hash(), grid, RefMethod::pt));
    CHECK(reference_cache_stem(a.content_hash(), grid, RefMethod::exact_dp) !=
          reference_cache_stem(a.content_hash(), {0.0, 2.0}, RefMethod::exact_dp));
}

}  // TEST_SUITE
