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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tempest {

// One undirected coupler, stored once with i < j. `weight` is the total
// coefficient of x_i x_j in the Hamiltonian.
struct Edge {
    int i;
    int j;
    double weight;
};

struct ModelMetadata {
    std::string label;
    std::string generator;  // "ran1", "ac3", "file", ...
    std::uint64_t seed = 0;
};

// Spin configuration, entries are exactly +1 or -1.
using SpinState = std::vector<std::int8_t>;

// Ising model H(x) = sum_edges w_ij x_i x_j + sum_i h_i x_i on an undirected
// graph. Immutable after construction and safe to share across threads; the
// per-spin neighbor list is precomputed because Gibbs sweeps are the hot loop.
class IsingModel {
public:
    IsingModel(int n_spins, std::vector<Edge> edges, std::vector<double> fields,
               ModelMetadata meta = {});

    int n_spins() const { return n_spins_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& fields() const { return fields_; }
    const ModelMetadata& metadata() const { return meta_; }
    bool has_fields() const { return has_fields_; }

    double energy(const SpinState& state) const;
    std::vector<double> effective_fields(const SpinState& state) const;
    // zeta_i = h_i + sum_j w_ij x_j; flipping spin i changes the energy by
    // -2 x_i zeta_i.
    double effective_field(const SpinState& state, int i) const;
    double flip_delta(const SpinState& state, int i) const;

    // neighbor list access (CSR)
    std::span<const int> neighbors(int i) const {
        return {adj_index_.data() + adj_offset_[i],
                static_cast<std::size_t>(adj_offset_[i + 1] - adj_offset_[i])};
    }
    std::span<const double> neighbor_weights(int i) const {
        return {adj_weight_.data() + adj_offset_[i],
                static_cast<std::size_t>(adj_offset_[i + 1] - adj_offset_[i])};
    }

    // Smallest s in {1, 2, 3, 4, 6, 12} such that s*w and s*h are all small
    // integers, if one exists. Lets samplers index flip probabilities by an
    // integer effective field (RAN1 scale 1, AC3 scale 3).
    std::optional<int> integer_scale() const { return integer_scale_; }
    // Bound on |s * zeta_i| over all spins when integer-scaled.
    int max_scaled_field() const { return max_scaled_field_; }
    std::span<const int> scaled_neighbor_weights(int i) const {
        return {scaled_weight_.data() + adj_offset_[i],
                static_cast<std::size_t>(adj_offset_[i + 1] - adj_offset_[i])};
    }
    const std::vector<int>& scaled_fields() const { return scaled_fields_; }

    // Order-independent content hash of (n_spins, edges, fields); used to key
    // reference caches.
    std::uint64_t content_hash() const { return content_hash_; }

private:
    int n_spins_;
    std::vector<Edge> edges_;
    std::vector<double> fields_;
    ModelMetadata meta_;
    bool has_fields_ = false;

    std::vector<int> adj_offset_;
    std::vector<int> adj_index_;
    std::vector<double> adj_weight_;

    std::optional<int> integer_scale_;
    int max_scaled_field_ = 0;
    std::vector<int> scaled_weight_;
    std::vector<int> scaled_fields_;

    std::uint64_t content_hash_ = 0;
};

struct PostProcessRecord {
    double beta = 0.0;
    int sweeps = 0;
};

struct SampleMeta {
    std::string sampler;           // "sta", "gibbs", "pt", "exact-dp", "exact-enum"
    std::string schedule_summary;  // e.g. "linear(0,3.54,2000)"
    std::uint64_t seed = 0;
    std::optional<PostProcessRecord> postprocess;
};

// A batch of spin configurations drawn from one model, with provenance.
// Rows are stored contiguously (n_samples x n_spins, int8 ±1).
class SampleSet {
public:
    SampleSet(std::string model_label, int n_spins, SampleMeta meta = {})
        : model_label_(std::move(model_label)), n_spins_(n_spins), meta_(std::move(meta)) {}

    int n_spins() const { return n_spins_; }
    int size() const { return static_cast<int>(data_.size()) / n_spins_; }
    bool empty() const { return data_.empty(); }
    const std::string& model_label() const { return model_label_; }
    const SampleMeta& meta() const { return meta_; }
    SampleMeta& meta() { return meta_; }

    std::span<const std::int8_t> state(int k) const {
        return {data_.data() + static_cast<std::size_t>(k) * n_spins_,
                static_cast<std::size_t>(n_spins_)};
    }
    std::span<std::int8_t> state(int k) {
        return {data_.data() + static_cast<std::size_t>(k) * n_spins_,
                static_cast<std::size_t>(n_spins_)};
    }
    SpinState state_copy(int k) const {
        auto s = state(k);
        return SpinState(s.begin(), s.end());
    }

    void reserve(int n) { data_.reserve(static_cast<std::size_t>(n) * n_spins_); }
    void resize(int n) { data_.resize(static_cast<std::size_t>(n) * n_spins_); }
    void append(std::span<const std::int8_t> row);

    const std::vector<std::int8_t>& raw() const { return data_; }
    std::vector<std::int8_t>& raw() { return data_; }

private:
    std::string model_label_;
    int n_spins_;
    std::vector<std::int8_t> data_;
    SampleMeta meta_;
};

// Per-sample energies and their mean; estimation helpers used all over.
std::vector<double> sample_energies(const IsingModel& model, const SampleSet& samples);
double mean_sample_energy(const IsingModel& model, const SampleSet& samples);
// Empirical <x_i x_j> per model edge.
std::vector<double> empirical_edge_correlations(const IsingModel& model, const SampleSet& samples);
// Empirical <x_i> per spin.
std::vector<double> empirical_magnetizations(const SampleSet& samples);

}  // namespace tempest
