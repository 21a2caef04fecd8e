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

#include "tempest/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace tempest {

namespace {

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
        h ^= p[k];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return fnv1a64(&bits, sizeof bits, h);
}

std::uint64_t hash_int(std::uint64_t h, std::int64_t v) {
    return fnv1a64(&v, sizeof v, h);
}

}  // namespace

IsingModel::IsingModel(int n_spins, std::vector<Edge> edges, std::vector<double> fields,
                       ModelMetadata meta)
    : n_spins_(n_spins), edges_(std::move(edges)), fields_(std::move(fields)),
      meta_(std::move(meta)) {
    if (n_spins_ < 1) throw std::invalid_argument("model must have at least one spin");
    if (fields_.empty()) fields_.assign(n_spins_, 0.0);
    if (static_cast<int>(fields_.size()) != n_spins_)
        throw std::invalid_argument("field vector length does not match n_spins");

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges_.size());
    for (const Edge& e : edges_) {
        if (e.i < 0 || e.j >= n_spins_ || e.i >= e.j)
            throw std::invalid_argument("edge indices must satisfy 0 <= i < j < n_spins");
        if (!std::isfinite(e.weight)) throw std::invalid_argument("edge weight is not finite");
        std::uint64_t key = static_cast<std::uint64_t>(e.i) * n_spins_ + e.j;
        if (!seen.insert(key).second) throw std::invalid_argument("duplicate edge");
    }
    for (double h : fields_) {
        if (!std::isfinite(h)) throw std::invalid_argument("field is not finite");
        if (h != 0.0) has_fields_ = true;
    }

    // neighbor lists (CSR)
    std::vector<int> degree(n_spins_, 0);
    for (const Edge& e : edges_) {
        ++degree[e.i];
        ++degree[e.j];
    }
    adj_offset_.assign(n_spins_ + 1, 0);
    for (int i = 0; i < n_spins_; ++i) adj_offset_[i + 1] = adj_offset_[i] + degree[i];
    adj_index_.resize(adj_offset_.back());
    adj_weight_.resize(adj_offset_.back());
    std::vector<int> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
    for (const Edge& e : edges_) {
        adj_index_[cursor[e.i]] = e.j;
        adj_weight_[cursor[e.i]++] = e.weight;
        adj_index_[cursor[e.j]] = e.i;
        adj_weight_[cursor[e.j]++] = e.weight;
    }

    // integer scaling for the table-driven Gibbs path
    for (int s : {1, 2, 3, 4, 6, 12}) {
        bool ok = true;
        for (const Edge& e : edges_) {
            double w = e.weight * s;
            if (w != std::nearbyint(w) || std::abs(w) > 120) { ok = false; break; }
        }
        if (ok) {
            for (double h : fields_) {
                double v = h * s;
                if (v != std::nearbyint(v) || std::abs(v) > 120) { ok = false; break; }
            }
        }
        if (!ok) continue;
        std::vector<int> sw(adj_weight_.size());
        for (std::size_t k = 0; k < adj_weight_.size(); ++k)
            sw[k] = static_cast<int>(std::nearbyint(adj_weight_[k] * s));
        std::vector<int> sf(n_spins_);
        int max_field = 0;
        bool in_range = true;
        for (int i = 0; i < n_spins_; ++i) {
            sf[i] = static_cast<int>(std::nearbyint(fields_[i] * s));
            long total = std::abs(static_cast<long>(sf[i]));
            for (int k = adj_offset_[i]; k < adj_offset_[i + 1]; ++k)
                total += std::abs(static_cast<long>(sw[k]));
            if (total > 2000) { in_range = false; break; }
            max_field = std::max(max_field, static_cast<int>(total));
        }
        if (!in_range) continue;
        integer_scale_ = s;
        scaled_weight_ = std::move(sw);
        scaled_fields_ = std::move(sf);
        max_scaled_field_ = max_field;
        break;
    }

    // content hash over a canonical (sorted) edge order
    std::vector<const Edge*> order(edges_.size());
    for (std::size_t k = 0; k < edges_.size(); ++k) order[k] = &edges_[k];
    std::sort(order.begin(), order.end(), [](const Edge* a, const Edge* b) {
        return a->i != b->i ? a->i < b->i : a->j < b->j;
    });
    std::uint64_t h = hash_int(0xcbf29ce484222325ULL, n_spins_);
    for (const Edge* e : order) {
        h = hash_int(h, e->i);
        h = hash_int(h, e->j);
        h = hash_double(h, e->weight);
    }
    for (double f : fields_) h = hash_double(h, f);
    content_hash_ = h;
}

double IsingModel::energy(const SpinState& state) const {
    if (static_cast<int>(state.size()) != n_spins_)
        throw std::invalid_argument("state length does not match model");
    double e = 0.0;
    for (const Edge& edge : edges_)
        e += edge.weight * state[edge.i] * state[edge.j];
    for (int i = 0; i < n_spins_; ++i) e += fields_[i] * state[i];
    return e;
}

std::vector<double> IsingModel::effective_fields(const SpinState& state) const {
    if (static_cast<int>(state.size()) != n_spins_)
        throw std::invalid_argument("state length does not match model");
    std::vector<double> zeta(fields_);
    for (int i = 0; i < n_spins_; ++i) {
        double z = zeta[i];
        for (int k = adj_offset_[i]; k < adj_offset_[i + 1]; ++k)
            z += adj_weight_[k] * state[adj_index_[k]];
        zeta[i] = z;
    }
    return zeta;
}

double IsingModel::effective_field(const SpinState& state, int i) const {
    double z = fields_[i];
    for (int k = adj_offset_[i]; k < adj_offset_[i + 1]; ++k)
        z += adj_weight_[k] * state[adj_index_[k]];
    return z;
}

double IsingModel::flip_delta(const SpinState& state, int i) const {
    if (i < 0 || i >= n_spins_) throw std::out_of_range("spin index out of range");
    if (static_cast<int>(state.size()) != n_spins_)
        throw std::invalid_argument("state length does not match model");
    return -2.0 * state[i] * effective_field(state, i);
}

void SampleSet::append(std::span<const std::int8_t> row) {
    if (static_cast<int>(row.size()) != n_spins_)
        throw std::invalid_argument("sample length does not match n_spins");
    data_.insert(data_.end(), row.begin(), row.end());
}

std::vector<double> sample_energies(const IsingModel& model, const SampleSet& samples) {
    if (samples.n_spins() != model.n_spins())
        throw std::invalid_argument("sample set does not match model");
    std::vector<double> out(samples.size());
    SpinState tmp(model.n_spins());
    for (int k = 0; k < samples.size(); ++k) {
        auto row = samples.state(k);
        std::copy(row.begin(), row.end(), tmp.begin());
        out[k] = model.energy(tmp);
    }
    return out;
}

double mean_sample_energy(const IsingModel& model, const SampleSet& samples) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    auto e = sample_energies(model, samples);
    double sum = 0.0;
    for (double v : e) sum += v;
    return sum / static_cast<double>(e.size());
}

std::vector<double> empirical_edge_correlations(const IsingModel& model,
                                                const SampleSet& samples) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    if (samples.n_spins() != model.n_spins())
        throw std::invalid_argument("sample set does not match model");
    const auto& edges = model.edges();
    std::vector<long long> acc(edges.size(), 0);
    for (int k = 0; k < samples.size(); ++k) {
        auto row = samples.state(k);
        for (std::size_t e = 0; e < edges.size(); ++e)
            acc[e] += row[edges[e].i] * row[edges[e].j];
    }
    std::vector<double> corr(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        corr[e] = static_cast<double>(acc[e]) / samples.size();
    return corr;
}

std::vector<double> empirical_magnetizations(const SampleSet& samples) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    std::vector<long long> acc(samples.n_spins(), 0);
    for (int k = 0; k < samples.size(); ++k) {
        auto row = samples.state(k);
        for (int i = 0; i < samples.n_spins(); ++i) acc[i] += row[i];
    }
    std::vector<double> mag(samples.n_spins());
    for (int i = 0; i < samples.n_spins(); ++i)
        mag[i] = static_cast<double>(acc[i]) / samples.size();
    return mag;
}

}  // namespace tempest
