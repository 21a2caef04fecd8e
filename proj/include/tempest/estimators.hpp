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
#include <span>
#include <string>
#include <vector>

#include "tempest/model.hpp"
#include "tempest/reference.hpp"
#include "tempest/sampling.hpp"

namespace tempest {

// Divergent or out-of-range estimates are reported as tagged sentinels plus
// the sign of the energy-matching function at the bracket edge, never as a
// large float, so downstream aggregation can tell divergence from a large
// estimate.
enum class Sentinel { none, below_grid, above_grid, minus_infinity, plus_infinity };

std::string sentinel_name(Sentinel s);

struct ObjectivePoint {
    double beta;
    double value;
    double se;
};
using ObjectiveCurve = std::vector<ObjectivePoint>;

struct EstimatorReport {
    std::string method;  // "ml" | "mlpl" | "min-mse" | "min-kl"
    double beta_hat;
    Sentinel sentinel = Sentinel::none;
    int edge_sign = 0;
    double objective_at_min;
    ObjectiveCurve objective_curve;
    std::vector<double> local_minima;
    int root_iterations = 0;
    double bracket_lo;
    double bracket_hi;
    double bootstrap_se;
    double jackknife_bias;
    bool postprocessed = false;
    std::string postprocess_mode = "off";
    bool fallback_global = false;

    EstimatorReport();
    bool is_finite() const { return sentinel == Sentinel::none; }
};

// Plug-in empirical distribution: mass 1/|S| on each observed state, or
// explicit weights (used to feed exact tables through the same code path).
class EmpiricalDistribution {
public:
    static EmpiricalDistribution from_samples(const SampleSet& samples);
    static EmpiricalDistribution from_weighted_states(int n_spins,
                                                      std::vector<SpinState> states,
                                                      std::vector<double> weights);

    int n_spins() const { return n_spins_; }
    int n_distinct() const { return static_cast<int>(states_.size()); }
    const std::vector<SpinState>& states() const { return states_; }
    const std::vector<double>& weights() const { return weights_; }

    // plug-in entropy -sum p log p (biased low for finite samples)
    double entropy() const;
    double mean_energy(const IsingModel& model) const;

private:
    int n_spins_ = 0;
    std::vector<SpinState> states_;
    std::vector<double> weights_;
};

struct EstimatorOptions {
    double tol = 1e-6;
    int max_iter = 200;
    double bracket_lo = 1e-3;  // initial MLPL bracket, expanded geometrically
    double bracket_hi = 10.0;
    int bootstrap_resamples = 200;
    int jackknife_blocks = 100;
    std::uint64_t resample_seed = 0x7e5a3b1fULL;
    bool with_uncertainty = true;
};

// Maximum likelihood: beta solving  mean_S H  =  <H>_{B_beta}  by bisection
// on the monotone reference energy curve.
EstimatorReport estimate_ml(const IsingModel& model, const SampleSet& samples,
                            const ReferenceStatistics& ref,
                            const EstimatorOptions& options = {});

// Maximum log-pseudo-likelihood: the unique root of
//   EM(beta) = sum_{x in S} sum_i u exp(2 beta u) / (1 + exp(2 beta u)),
//   u = x_i zeta_i(x),
// which exists iff the u values take both signs (at least one local
// excitation in some sample).
EstimatorReport estimate_mlpl(const IsingModel& model, const SampleSet& samples,
                              const EstimatorOptions& options = {});

// EM evaluated at one beta (diagnostic / curve output).
double mlpl_energy_matching(const IsingModel& model, const SampleSet& samples, double beta);

// MSE on correlations over the reference grid:
//   MSE(beta) = (1/M) sum_edges (empirical <x_i x_j> - <x_i x_j>_beta)^2.
// Single-variable terms enter only when `include_single_variable` is set
// (zero-field models have <x_i> = 0 identically).
ObjectiveCurve mse_curve(const IsingModel& model, const SampleSet& samples,
                         const ReferenceStatistics& ref, bool with_se = false,
                         bool include_single_variable = false);

enum class MinMode { global, rightmost_local };

// Grid argmin refined by quadratic interpolation of the three bracketing
// points; rightmost-local mode picks the largest-beta interior local minimum
// and falls back to the global one (flagged) when none exists.
EstimatorReport estimate_min_mse(const ObjectiveCurve& curve, MinMode mode = MinMode::global);

// KL divergence decomposition over the grid:
//   D(beta) = -H(P) + beta <H>_P + log Z(beta).
// Requires a reference that provides log Z.
ObjectiveCurve kl_curve(const IsingModel& model, const EmpiricalDistribution& dist,
                        const ReferenceStatistics& ref);

EstimatorReport estimate_min_kl(const ObjectiveCurve& curve);

std::vector<double> interior_local_minima(const ObjectiveCurve& curve);

// Leave-one-block-out jackknife: corrected = B*est - (B-1)*mean(est_{-b}).
struct JackknifeResult {
    double estimate;
    double corrected;
    double bias;  // estimate - corrected
    double se;
};
JackknifeResult jackknife_bias_correct(
    int n_samples, int blocks,
    const std::function<double(std::span<const int>)>& statistic);

double bootstrap_se(int n_samples, int resamples, std::uint64_t seed,
                    const std::function<double(std::span<const int>)>& statistic);

enum class CurveObjective { mse, kl };

// Beta-coupled post-processing: at each grid beta, post-process the raw
// samples at that same beta (independent RNG sub-stream per grid point) and
// evaluate the objective there. The raw samples are never mutated.
ObjectiveCurve curve_with_postprocessing(const IsingModel& model, const SampleSet& samples,
                                         const ReferenceStatistics& ref,
                                         const Coloring& coloring, int n_sweeps,
                                         std::uint64_t seed, CurveObjective objective);

}  // namespace tempest
