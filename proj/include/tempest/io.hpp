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

#include <filesystem>
#include <optional>
#include <string>

#include "tempest/model.hpp"
#include "tempest/reference.hpp"
#include "tempest/topology.hpp"

namespace tempest {

// Lossless float formatting (17 significant digits).
std::string format17(double v);

// All writers go through a temp file + rename so readers never observe a
// partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64_string(const std::string& s);

// Instance files: JSON with n_spins, edge triples, sparse field pairs, and
// metadata (including the generating topology when known).
void write_instance(const std::filesystem::path& path, const IsingModel& model,
                    const ChimeraSpec* topology = nullptr);
struct LoadedInstance {
    IsingModel model;
    std::optional<ChimeraSpec> topology;
};
LoadedInstance read_instance(const std::filesystem::path& path);

// Sample sets: CSV (header comments + one ±1 row per sample) or a packed
// bitmap (1 bit/spin, rows padded to byte boundary).
void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples);
SampleSet read_samples_csv(const std::filesystem::path& path);
void write_samples_binary(const std::filesystem::path& path, const SampleSet& samples);
SampleSet read_samples_binary(const std::filesystem::path& path);
// dispatch on extension: .csv vs anything else (binary)
void write_samples(const std::filesystem::path& path, const SampleSet& samples);
SampleSet read_samples(const std::filesystem::path& path);

// Reference statistics cache: a JSON metadata file plus a wide CSV
// (beta, mean_energy, log_z, per-edge correlations, optional SEs).
void write_reference(const std::filesystem::path& json_path, const ReferenceStatistics& ref);
ReferenceStatistics read_reference(const std::filesystem::path& json_path);
// cache key: (instance hash, grid, method)
std::string reference_cache_stem(const ReferenceStatistics& ref);
std::string reference_cache_stem(std::uint64_t model_hash, const std::vector<double>& grid,
                                 RefMethod method);

}  // namespace tempest
