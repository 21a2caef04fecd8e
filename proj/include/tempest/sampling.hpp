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
#include <functional>
#include <string>
#include <vector>

#include "tempest/model.hpp"
#include "tempest/rng.hpp"
#include "tempest/topology.hpp"

namespace tempest {

// One beta per sweep. The standard STA schedule is a linear interpolation
// from 0 (first sweep) to beta_t (last sweep) inclusive.
struct AnnealSchedule {
    std::vector<double> betas;

    static AnnealSchedule linear(double beta_t, int sweeps);
    static AnnealSchedule constant(double beta, int sweeps);
    std::string summary() const;
};

// Color classes; each class must be an independent set and the classes must
// partition the spins.
using Coloring = std::vector<std::vector<int>>;

Coloring two_coloring(const TopologyGraph& graph);
// BFS 2-coloring when the interaction graph is bipartite, greedy otherwise.
Coloring greedy_coloring(const IsingModel& model);
void validate_coloring(const IsingModel& model, const Coloring& coloring);

// P_beta(x_i = +1 | rest) = exp(-beta*zeta) / (2 cosh(beta*zeta)), evaluated
// in logistic form so it saturates instead of overflowing.
double conditional_flip_prob(double zeta, double beta);

// Blocked Gibbs kernel. Classes are processed in fixed order; within a class
// the conditional distribution depends only on the complement, so in-place
// sequential resampling equals a simultaneous block update.
class GibbsSampler {
public:
    GibbsSampler(const IsingModel& model, Coloring coloring);

    const IsingModel& model() const { return *model_; }
    const Coloring& coloring() const { return coloring_; }

    void sweep(SpinState& state, double beta, Xoshiro256pp& rng) const;

    // integer-field fast path: probability thresholds indexed by the scaled
    // effective field, rebuilt per beta
    bool has_fast_path() const { return fast_path_; }
    std::vector<std::uint64_t> threshold_table(double beta) const;
    void sweep_with_table(SpinState& state, const std::vector<std::uint64_t>& table,
                          Xoshiro256pp& rng) const;

    void random_state(SpinState& state, Xoshiro256pp& rng) const;

private:
    const IsingModel* model_;
    Coloring coloring_;
    std::vector<int> scan_order_;  // class members flattened, classes in order
    bool fast_path_ = false;
};

// Simulated thermal annealing: n_samples independent anneals, each starting
// from a uniform random state, one Gibbs sweep per schedule entry. Sample k
// uses RNG sub-stream (seed, k), so output is bit-identical however chains
// are scheduled.
SampleSet run_sta(const IsingModel& model, const AnnealSchedule& schedule, int n_samples,
                  const Coloring& coloring, std::uint64_t seed, int threads = 1);

// Evolve each sample independently by n_sweeps Gibbs sweeps at fixed beta.
// The input set is never mutated; output metadata records (beta, n_sweeps).
SampleSet postprocess(const SampleSet& samples, const IsingModel& model, double beta,
                      int n_sweeps, const Coloring& coloring, std::uint64_t seed,
                      int threads = 1);

struct PtDiagnostics {
    std::vector<long long> attempts;  // per adjacent pair
    std::vector<long long> accepts;
    std::vector<double> acceptance_rate;
    std::vector<double> mean_energy_trace;  // per replica, coarse trace over rounds
};

struct PtResult {
    std::vector<double> ladder;
    std::vector<SampleSet> per_beta;  // recorded once per exchange round, post burn-in
    PtDiagnostics diagnostics;
};

// Replica exchange over a strictly increasing beta ladder. Adjacent replicas
// swap states with probability min(1, exp((beta_a - beta_b)(H(x_a) - H(x_b))));
// even and odd pairs alternate between rounds. A single-rung ladder degenerates
// to a plain Gibbs chain.
PtResult run_parallel_tempering(const IsingModel& model, const std::vector<double>& ladder,
                                int sweeps_per_exchange, int n_exchanges, int burn_in,
                                std::uint64_t seed, const Coloring& coloring);

// Same chain, but post-burn-in rounds are handed to an observer instead of
// being stored; pt_stats accumulates running statistics this way.
using PtObserver = std::function<void(int round, const std::vector<SpinState>& states,
                                      const std::vector<double>& energies)>;
PtDiagnostics run_pt_observed(const IsingModel& model, const std::vector<double>& ladder,
                              int sweeps_per_exchange, int n_exchanges, int burn_in,
                              std::uint64_t seed, const Coloring& coloring,
                              const PtObserver& observe);

double pt_swap_probability(double beta_a, double beta_b, double energy_a, double energy_b);

// Geometric ladder from 0.1 to beta_max with 16 rungs.
std::vector<double> default_pt_ladder(double beta_max);

}  // namespace tempest
