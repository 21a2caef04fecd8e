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

#include "tempest/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <thread>

namespace tempest {

AnnealSchedule AnnealSchedule::linear(double beta_t, int sweeps) {
    if (sweeps < 1) throw std::invalid_argument("schedule needs at least one sweep");
    if (beta_t < 0) throw std::invalid_argument("beta_t must be non-negative");
    AnnealSchedule s;
    s.betas.resize(sweeps);
    if (sweeps == 1) {
        s.betas[0] = beta_t;
    } else {
        for (int k = 0; k < sweeps; ++k)
            s.betas[k] = beta_t * static_cast<double>(k) / (sweeps - 1);
    }
    return s;
}

AnnealSchedule AnnealSchedule::constant(double beta, int sweeps) {
    if (sweeps < 1) throw std::invalid_argument("schedule needs at least one sweep");
    AnnealSchedule s;
    s.betas.assign(sweeps, beta);
    return s;
}

std::string AnnealSchedule::summary() const {
    if (betas.empty()) return "empty";
    char buf[96];
    bool is_const = true;
    for (double b : betas)
        if (b != betas.front()) { is_const = false; break; }
    if (is_const) {
        std::snprintf(buf, sizeof buf, "const(%.6g,%zu)", betas.front(), betas.size());
        return buf;
    }
    // linear check
    bool linear = true;
    const int n = static_cast<int>(betas.size());
    for (int k = 0; k < n; ++k) {
        double expect = betas.front() + (betas.back() - betas.front()) * k / (n - 1);
        if (std::abs(betas[k] - expect) > 1e-12) { linear = false; break; }
    }
    if (linear) {
        std::snprintf(buf, sizeof buf, "linear(%.6g,%.6g,%d)", betas.front(), betas.back(), n);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "custom(%d)", n);
    return buf;
}

Coloring two_coloring(const TopologyGraph& graph) {
    Coloring classes(2);
    for (int v = 0; v < graph.n_nodes; ++v) classes[graph.coloring[v]].push_back(v);
    return classes;
}

Coloring greedy_coloring(const IsingModel& model) {
    const int n = model.n_spins();
    std::vector<int> color(n, -1);
    bool bipartite = true;
    // BFS 2-coloring attempt
    for (int start = 0; start < n && bipartite; ++start) {
        if (color[start] >= 0) continue;
        color[start] = 0;
        std::deque<int> queue{start};
        while (!queue.empty() && bipartite) {
            int v = queue.front();
            queue.pop_front();
            for (int u : model.neighbors(v)) {
                if (color[u] < 0) {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if (color[u] == color[v]) {
                    bipartite = false;
                    break;
                }
            }
        }
    }
    if (!bipartite) {
        // first-fit greedy in index order
        std::fill(color.begin(), color.end(), -1);
        for (int v = 0; v < n; ++v) {
            std::vector<bool> used;
            for (int u : model.neighbors(v))
                if (color[u] >= 0) {
                    if (color[u] >= static_cast<int>(used.size())) used.resize(color[u] + 1);
                    used[color[u]] = true;
                }
            int c = 0;
            while (c < static_cast<int>(used.size()) && used[c]) ++c;
            color[v] = c;
        }
    }
    int n_colors = *std::max_element(color.begin(), color.end()) + 1;
    Coloring classes(n_colors);
    for (int v = 0; v < n; ++v) classes[color[v]].push_back(v);
    return classes;
}

void validate_coloring(const IsingModel& model, const Coloring& coloring) {
    const int n = model.n_spins();
    std::vector<int> owner(n, -1);
    for (std::size_t c = 0; c < coloring.size(); ++c) {
        for (int v : coloring[c]) {
            if (v < 0 || v >= n) throw std::invalid_argument("coloring refers to invalid spin");
            if (owner[v] >= 0) throw std::invalid_argument("coloring classes are not disjoint");
            owner[v] = static_cast<int>(c);
        }
    }
    for (int v = 0; v < n; ++v)
        if (owner[v] < 0) throw std::invalid_argument("coloring does not cover all spins");
    for (const Edge& e : model.edges())
        if (owner[e.i] == owner[e.j])
            throw std::invalid_argument("coloring class is not an independent set");
}

double conditional_flip_prob(double zeta, double beta) {
    const double z = 2.0 * beta * zeta;  // P(+1) = 1 / (1 + e^z)
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    const double e = std::exp(z);
    return 1.0 / (1.0 + e);
}

GibbsSampler::GibbsSampler(const IsingModel& model, Coloring coloring)
    : model_(&model), coloring_(std::move(coloring)) {
    validate_coloring(model, coloring_);
    for (const auto& cls : coloring_)
        scan_order_.insert(scan_order_.end(), cls.begin(), cls.end());
    fast_path_ = model.integer_scale().has_value();
}

void GibbsSampler::sweep(SpinState& state, double beta, Xoshiro256pp& rng) const {
    if (static_cast<int>(state.size()) != model_->n_spins())
        throw std::invalid_argument("state length does not match model");
    for (int i : scan_order_) {
        const double zeta = model_->effective_field(state, i);
        const double p_up = conditional_flip_prob(zeta, beta);
        state[i] = rng.next_double() < p_up ? 1 : -1;
    }
}

std::vector<std::uint64_t> GibbsSampler::threshold_table(double beta) const {
    if (!fast_path_) throw std::logic_error("model has no integer scaling");
    const int scale = *model_->integer_scale();
    const int max_field = model_->max_scaled_field();
    std::vector<std::uint64_t> table(2 * max_field + 1);
    for (int z = -max_field; z <= max_field; ++z) {
        const double p = conditional_flip_prob(static_cast<double>(z) / scale, beta);
        const double scaled = p * 0x1.0p64;
        table[z + max_field] =
            scaled >= 0x1.0p64 ? ~0ULL : static_cast<std::uint64_t>(scaled);
    }
    return table;
}

void GibbsSampler::sweep_with_table(SpinState& state, const std::vector<std::uint64_t>& table,
                                    Xoshiro256pp& rng) const {
    const int offset = model_->max_scaled_field();
    const auto& fields = model_->scaled_fields();
    for (int i : scan_order_) {
        int acc = fields[i];
        const auto nbrs = model_->neighbors(i);
        const auto wts = model_->scaled_neighbor_weights(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k) acc += wts[k] * state[nbrs[k]];
        state[i] = rng.next_u64() < table[acc + offset] ? 1 : -1;
    }
}

void GibbsSampler::random_state(SpinState& state, Xoshiro256pp& rng) const {
    state.resize(model_->n_spins());
    for (auto& s : state) s = static_cast<std::int8_t>(rng.next_spin());
}

namespace {

// Runs chains [first, last) of an embarrassingly parallel batch. `tables` is
// non-empty on the integer fast path, one threshold table per schedule entry.
void run_chains(const GibbsSampler& sampler, const std::vector<double>& betas,
                const std::vector<std::vector<std::uint64_t>>& tables, std::uint64_t seed,
                int first, int last, SampleSet& out,
                const SampleSet* init /* nullptr = uniform start */) {
    SpinState state(sampler.model().n_spins());
    for (int k = first; k < last; ++k) {
        Xoshiro256pp rng = Xoshiro256pp::substream(seed, static_cast<std::uint64_t>(k));
        if (init) {
            auto row = init->state(k);
            std::copy(row.begin(), row.end(), state.begin());
        } else {
            sampler.random_state(state, rng);
        }
        if (!tables.empty()) {
            for (const auto& table : tables) sampler.sweep_with_table(state, table, rng);
        } else {
            for (double beta : betas) sampler.sweep(state, beta, rng);
        }
        auto row = out.state(k);
        std::copy(state.begin(), state.end(), row.begin());
    }
}

void run_batch(const GibbsSampler& sampler, const std::vector<double>& betas,
               std::uint64_t seed, int n_samples, int threads, SampleSet& out,
               const SampleSet* init) {
    out.resize(n_samples);
    std::vector<std::vector<std::uint64_t>> tables;
    if (sampler.has_fast_path()) {
        tables.reserve(betas.size());
        for (double beta : betas) tables.push_back(sampler.threshold_table(beta));
    }
    threads = std::max(1, std::min(threads, n_samples));
    if (threads == 1) {
        run_chains(sampler, betas, tables, seed, 0, n_samples, out, init);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        int first = static_cast<int>(static_cast<long long>(n_samples) * t / threads);
        int last = static_cast<int>(static_cast<long long>(n_samples) * (t + 1) / threads);
        pool.emplace_back(run_chains, std::cref(sampler), std::cref(betas), std::cref(tables),
                          seed, first, last, std::ref(out), init);
    }
    for (auto& th : pool) th.join();
}

}  // namespace

SampleSet run_sta(const IsingModel& model, const AnnealSchedule& schedule, int n_samples,
                  const Coloring& coloring, std::uint64_t seed, int threads) {
    if (schedule.betas.empty()) throw std::invalid_argument("empty anneal schedule");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    GibbsSampler sampler(model, coloring);
    SampleSet out(model.metadata().label, model.n_spins(),
                  SampleMeta{"sta", schedule.summary(), seed, std::nullopt});
    run_batch(sampler, schedule.betas, seed, n_samples, threads, out, nullptr);
    return out;
}

SampleSet postprocess(const SampleSet& samples, const IsingModel& model, double beta,
                      int n_sweeps, const Coloring& coloring, std::uint64_t seed, int threads) {
    if (samples.n_spins() != model.n_spins())
        throw std::invalid_argument("sample set does not match model");
    if (n_sweeps < 0) throw std::invalid_argument("n_sweeps must be >= 0");
    SampleMeta meta = samples.meta();
    meta.postprocess = PostProcessRecord{beta, n_sweeps};
    SampleSet out(samples.model_label(), samples.n_spins(), std::move(meta));
    if (n_sweeps == 0) {
        out.raw() = samples.raw();
        return out;
    }
    GibbsSampler sampler(model, coloring);
    std::vector<double> betas(n_sweeps, beta);
    run_batch(sampler, betas, seed, samples.size(), threads, out, &samples);
    return out;
}

double pt_swap_probability(double beta_a, double beta_b, double energy_a, double energy_b) {
    const double log_ratio = (beta_a - beta_b) * (energy_a - energy_b);
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

PtDiagnostics run_pt_observed(const IsingModel& model, const std::vector<double>& ladder,
                              int sweeps_per_exchange, int n_exchanges, int burn_in,
                              std::uint64_t seed, const Coloring& coloring,
                              const PtObserver& observe) {
    if (ladder.empty()) throw std::invalid_argument("empty beta ladder");
    for (std::size_t r = 1; r < ladder.size(); ++r)
        if (ladder[r] <= ladder[r - 1])
            throw std::invalid_argument("beta ladder must be strictly increasing");
    if (sweeps_per_exchange < 1) throw std::invalid_argument("sweeps_per_exchange must be >= 1");
    if (burn_in >= n_exchanges)
        throw std::invalid_argument("burn-in leaves no rounds to record");

    const int n_replicas = static_cast<int>(ladder.size());
    GibbsSampler sampler(model, coloring);

    std::vector<SpinState> states(n_replicas);
    std::vector<Xoshiro256pp> rngs;
    rngs.reserve(n_replicas);
    for (int r = 0; r < n_replicas; ++r) {
        rngs.push_back(Xoshiro256pp::substream(seed, static_cast<std::uint64_t>(r)));
        sampler.random_state(states[r], rngs[r]);
    }
    Xoshiro256pp exchange_rng =
        Xoshiro256pp::substream(seed, static_cast<std::uint64_t>(n_replicas));

    PtDiagnostics diag;
    diag.attempts.assign(std::max(0, n_replicas - 1), 0);
    diag.accepts.assign(std::max(0, n_replicas - 1), 0);
    diag.mean_energy_trace.assign(n_replicas, 0.0);

    std::vector<double> energies(n_replicas);
    long long recorded = 0;
    for (int round = 0; round < n_exchanges; ++round) {
        for (int r = 0; r < n_replicas; ++r)
            for (int s = 0; s < sweeps_per_exchange; ++s)
                sampler.sweep(states[r], ladder[r], rngs[r]);
        for (int r = 0; r < n_replicas; ++r) energies[r] = model.energy(states[r]);
        if (n_replicas > 1) {
            for (int p = round % 2; p + 1 < n_replicas; p += 2) {
                const double prob =
                    pt_swap_probability(ladder[p], ladder[p + 1], energies[p], energies[p + 1]);
                ++diag.attempts[p];
                if (exchange_rng.next_double() < prob) {
                    std::swap(states[p], states[p + 1]);
                    std::swap(energies[p], energies[p + 1]);
                    ++diag.accepts[p];
                }
            }
        }
        if (round >= burn_in) {
            for (int r = 0; r < n_replicas; ++r) diag.mean_energy_trace[r] += energies[r];
            observe(round - burn_in, states, energies);
            ++recorded;
        }
    }
    diag.acceptance_rate.resize(diag.attempts.size());
    for (std::size_t p = 0; p < diag.attempts.size(); ++p)
        diag.acceptance_rate[p] =
            diag.attempts[p]
                ? static_cast<double>(diag.accepts[p]) / diag.attempts[p]
                : 0.0;
    if (recorded > 0)
        for (auto& e : diag.mean_energy_trace) e /= static_cast<double>(recorded);
    return diag;
}

PtResult run_parallel_tempering(const IsingModel& model, const std::vector<double>& ladder,
                                int sweeps_per_exchange, int n_exchanges, int burn_in,
                                std::uint64_t seed, const Coloring& coloring) {
    PtResult result;
    result.ladder = ladder;
    for (std::size_t r = 0; r < ladder.size(); ++r) {
        char sched[64];
        std::snprintf(sched, sizeof sched, "pt(beta=%.6g)", ladder[r]);
        result.per_beta.emplace_back(model.metadata().label, model.n_spins(),
                                     SampleMeta{"pt", sched, seed, std::nullopt});
        result.per_beta.back().reserve(n_exchanges - burn_in);
    }
    result.diagnostics = run_pt_observed(
        model, ladder, sweeps_per_exchange, n_exchanges, burn_in, seed, coloring,
        [&](int, const std::vector<SpinState>& states, const std::vector<double>&) {
            for (std::size_t r = 0; r < states.size(); ++r)
                result.per_beta[r].append(
                    std::span<const std::int8_t>(states[r].data(), states[r].size()));
        });
    return result;
}

std::vector<double> default_pt_ladder(double beta_max) {
    if (beta_max <= 0.1) return {beta_max};
    const int rungs = 16;
    std::vector<double> ladder(rungs);
    const double lo = 0.1;
    for (int r = 0; r < rungs; ++r)
        ladder[r] = lo * std::pow(beta_max / lo, static_cast<double>(r) / (rungs - 1));
    ladder.back() = beta_max;
    return ladder;
}

}  // namespace tempest
