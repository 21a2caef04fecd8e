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
#include <string>
#include <vector>

#include "tempest/model.hpp"

namespace tempest {

enum class RefMethod { exact_enum, exact_dp, pt };

std::string ref_method_name(RefMethod m);
RefMethod ref_method_from_name(const std::string& name);

// Boltzmann-side ground truth on a beta grid: mean energy, log Z, and
// per-edge correlations, exact (enumeration / dynamic programming) or
// PT-estimated with standard errors.
struct ReferenceStatistics {
    RefMethod method = RefMethod::exact_enum;
    std::string method_detail;  // e.g. "dp(width=12,energy=weighted-pass)"
    std::string model_label;
    std::uint64_t model_hash = 0;
    std::vector<Edge> edges;  // edge order for the correlation columns

    std::vector<double> beta_grid;
    std::vector<double> mean_energy;
    std::vector<double> log_z;  // NaN when unavailable (pt without TI)
    std::vector<std::vector<double>> edge_correlations;   // [beta][edge]
    std::vector<std::vector<double>> magnetizations;      // [beta][spin]

    // pt only
    std::vector<double> mean_energy_se;
    std::vector<double> log_z_se;
    std::vector<std::vector<double>> corr_se;

    bool has_log_z() const;
    int grid_index_of(double beta, double tol = 1e-9) const;  // -1 if absent
};

// 0 to 1.5*beta_t in steps of `step` (default 0.05).
std::vector<double> default_beta_grid(double beta_t, double step = 0.05);

// Exact statistics by summation over all 2^N states (log-sum-exp stabilized).
ReferenceStatistics exact_stats_enumeration(const IsingModel& model,
                                            const std::vector<double>& beta_grid,
                                            int n_spins_cap = 28);

// Exact Boltzmann samples for small models: CDF inversion over the enumerated
// distribution. Testing utility.
SampleSet sample_exact_enum(const IsingModel& model, double beta, int n_samples,
                            std::uint64_t seed, int n_spins_cap = 28);

struct DpOptions {
    int width_cap = 20;
    // Mean energy comes from an energy-weighted elimination pass by default;
    // finite differences of log Z are kept as a cross-check mode.
    bool finite_diff_energy = false;
    double finite_diff_delta = 1e-4;
};

// Exact statistics by bucket elimination over log-space factor tables. The
// elimination order is chosen automatically (better of index order and greedy
// min-fill) unless one is supplied; its induced width is validated against
// the cap, never assumed.
ReferenceStatistics exact_stats_dp(const IsingModel& model,
                                   const std::vector<double>& beta_grid,
                                   const DpOptions& options = {});
ReferenceStatistics exact_stats_dp(const IsingModel& model, const std::vector<int>& order,
                                   const std::vector<double>& beta_grid,
                                   const DpOptions& options = {});

// Exact Boltzmann samples via a forward elimination pass plus per-sample
// backward sampling; feasible whenever the elimination width is.
SampleSet sample_exact_dp(const IsingModel& model, double beta, int n_samples,
                          std::uint64_t seed, int width_cap = 20);

// Induced width of an elimination order (or of the automatic choice).
int dp_induced_width(const IsingModel& model);
int dp_induced_width(const IsingModel& model, const std::vector<int>& order);

struct PtStatsOptions {
    int sweeps_per_exchange = 2;
    int rounds = 6000;              // exchange rounds; burn-in is a fraction of this
    double burn_in_fraction = 0.25;
    bool thermodynamic_integration = true;  // log Z(b) = N log 2 - trapz of <H>
    int bootstrap_resamples = 200;
    int bootstrap_blocks = 30;
};

// PT-estimated statistics at each grid beta (the grid is the ladder; a hot
// rung near 0 is prepended if the grid lacks one). Standard errors come from
// a block bootstrap over exchange rounds.
ReferenceStatistics pt_stats(const IsingModel& model, const std::vector<double>& beta_grid,
                             const PtStatsOptions& options, std::uint64_t seed);

struct RefPoint {
    double mean_energy;
    double log_z;
    std::vector<double> correlations;
};

// Piecewise-linear interpolation in beta for energy and correlations; log Z
// by cubic Hermite with slope -<H> at the grid points, which keeps
// d log Z / d beta = -<H> exact there. Queries outside the grid hull throw.
RefPoint interpolate_reference(const ReferenceStatistics& ref, double beta);
double interpolate_mean_energy(const ReferenceStatistics& ref, double beta);
double interpolate_log_z(const ReferenceStatistics& ref, double beta);

}  // namespace tempest
