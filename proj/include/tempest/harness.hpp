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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tempest/estimators.hpp"
#include "tempest/model.hpp"
#include "tempest/reference.hpp"
#include "tempest/topology.hpp"

namespace tempest {

// Flat key = value configuration; every key can be overridden on the command
// line. Seeds are explicit so every output row is traceable to
// (instance seed, sampler seed).
struct ExperimentConfig {
    std::string problem_class = "ran1";  // ran1 | ac3
    int rows = 2;
    int cols = 2;
    int shore = 4;
    std::vector<int> dead_qubits;
    std::vector<std::pair<int, int>> dead_couplers;
    int n_instances = 10;
    std::uint64_t instance_seed_base = 101;

    double beta_t = 3.54;
    int sweeps = 2000;
    int n_samples = 10000;
    std::uint64_t sampler_seed_base = 5001;

    std::string reference_method = "dp";  // enum | dp | pt
    double grid_step = 0.05;
    double grid_max = -1.0;  // <0 means 1.5 * beta_t
    int enum_cap = 28;
    int dp_width_cap = 20;
    int pt_rounds = 6000;

    std::vector<std::string> estimators = {"ml", "mlpl", "min-mse", "min-kl"};
    std::string postprocess = "off";  // off | fixed:<beta> | coupled
    int postprocess_sweeps = 1;

    std::vector<double> fractions = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};
    std::vector<int> sweep_set = {2000, 20};

    std::string out_dir = "results";
    int threads = 1;

    static ExperimentConfig from_file(const std::filesystem::path& path);
    void apply_override(const std::string& key, const std::string& value);
    std::string canonical() const;  // stable key=value dump used for hashing
    std::uint64_t config_hash() const;
    std::vector<double> beta_grid() const;
    ChimeraSpec chimera_spec() const;
    std::string size_tag() const;  // e.g. "c2", "c4"
};

struct StageStatus {
    std::string name;
    std::string status;  // "computed" | "cached" | "error"
    std::vector<std::string> files;
    std::string message;
};

struct Manifest {
    std::string version;
    std::uint64_t config_hash = 0;
    std::string config_text;
    std::vector<StageStatus> stages;
    std::map<std::string, std::uint64_t> file_hashes;
    std::uint64_t manifest_hash = 0;  // over (version, config, file hashes)
    bool ok = true;
};

void finalize_manifest(Manifest& manifest);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Full pipeline: generate -> reference -> sample -> estimate -> aggregate.
// Stages are cached by output file name (names encode seeds and hashes), so
// deleting one artifact recomputes only that stage; failures leave no
// partial CSVs behind.
Manifest run_full_pipeline(const ExperimentConfig& config);

// Fig. 4 analogue: terminal beta_t swept over fractions of the default, MLPL
// and ML per instance, quartiles per fraction.
Manifest run_rescaling_sweep(const ExperimentConfig& config);

// Fig. 7/9 analogue: MSE(beta) per sampler setting, raw and beta-coupled
// post-processed curves sharing sampler seeds.
Manifest run_mse_beta_scan(const ExperimentConfig& config);

// Fig. 8/10 analogue: (beta_min_mse, beta_ml, mse_at_min) per instance, raw
// and post-processed.
Manifest run_estimator_scatter(const ExperimentConfig& config);

// shared plumbing used by the presets and the CLI
IsingModel generate_instance(const ExperimentConfig& config, int index);
ReferenceStatistics reference_for(const ExperimentConfig& config, const IsingModel& model,
                                  const std::vector<double>& grid, StageStatus* status);

struct QuartileSummary {
    double q1;
    double median;
    double q3;
};
QuartileSummary quartiles(std::vector<double> values);

}  // namespace tempest
