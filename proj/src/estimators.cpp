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

#include "tempest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "tempest/rng.hpp"

namespace tempest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logistic(double z) {
    // exp(z) / (1 + exp(z)) without overflow
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::string state_key(std::span<const std::int8_t> row) {
    std::string key(row.size(), '\0');
    for (std::size_t i = 0; i < row.size(); ++i) key[i] = row[i] > 0 ? '+' : '-';
    return key;
}

double mean_over(std::span<const double> values, std::span<const int> idx) {
    double acc = 0.0;
    for (int k : idx) acc += values[k];
    return acc / static_cast<double>(idx.size());
}

double sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string sentinel_name(Sentinel s) {
    switch (s) {
        case Sentinel::none: return "none";
        case Sentinel::below_grid: return "below-grid";
        case Sentinel::above_grid: return "above-grid";
        case Sentinel::minus_infinity: return "minus-infinity";
        case Sentinel::plus_infinity: return "plus-infinity";
    }
    return "?";
}

EstimatorReport::EstimatorReport()
    : beta_hat(kNaN), objective_at_min(kNaN), bracket_lo(kNaN), bracket_hi(kNaN),
      bootstrap_se(kNaN), jackknife_bias(kNaN) {}

// ---------------------------------------------------------------------------
// empirical distribution

EmpiricalDistribution EmpiricalDistribution::from_samples(const SampleSet& samples) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    std::unordered_map<std::string, int> counts;
    counts.reserve(samples.size());
    for (int k = 0; k < samples.size(); ++k) ++counts[state_key(samples.state(k))];
    EmpiricalDistribution dist;
    dist.n_spins_ = samples.n_spins();
    dist.states_.reserve(counts.size());
    dist.weights_.reserve(counts.size());
    for (const auto& [key, count] : counts) {
        SpinState state(key.size());
        for (std::size_t i = 0; i < key.size(); ++i)
            state[i] = key[i] == '+' ? 1 : -1;
        dist.states_.push_back(std::move(state));
        dist.weights_.push_back(static_cast<double>(count) / samples.size());
    }
    return dist;
}

EmpiricalDistribution EmpiricalDistribution::from_weighted_states(
    int n_spins, std::vector<SpinState> states, std::vector<double> weights) {
    if (states.size() != weights.size() || states.empty())
        throw std::invalid_argument("states and weights must match and be non-empty");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("weights sum to zero");
    for (auto& w : weights) w /= total;
    EmpiricalDistribution dist;
    dist.n_spins_ = n_spins;
    dist.states_ = std::move(states);
    dist.weights_ = std::move(weights);
    return dist;
}

double EmpiricalDistribution::entropy() const {
    double h = 0.0;
    for (double w : weights_)
        if (w > 0.0) h -= w * std::log(w);
    return h;
}

double EmpiricalDistribution::mean_energy(const IsingModel& model) const {
    double e = 0.0;
    for (std::size_t k = 0; k < states_.size(); ++k)
        e += weights_[k] * model.energy(states_[k]);
    return e;
}

// ---------------------------------------------------------------------------
// maximum likelihood

namespace {

// Bisection for an increasing function with a sign change on [lo, hi].
struct RootResult {
    double root;
    int iterations;
};

template <typename F>
RootResult bisect(F&& f, double lo, double hi, double tol, int max_iter) {
    int it = 0;
    while (hi - lo > tol && it < max_iter) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        ++it;
    }
    return {0.5 * (lo + hi), it};
}

double ml_root(const ReferenceStatistics& ref, double sample_energy, double tol, int max_iter,
               Sentinel* sentinel, int* edge_sign, int* iterations) {
    const double lo = ref.beta_grid.front();
    const double hi = ref.beta_grid.back();
    // EM(beta) = E_S - <H>_ref(beta) is increasing (reference energy is
    // non-increasing in beta)
    const double em_lo = sample_energy - interpolate_mean_energy(ref, lo);
    const double em_hi = sample_energy - interpolate_mean_energy(ref, hi);
    if (em_lo > 0.0) {
        if (sentinel) *sentinel = Sentinel::below_grid;
        if (edge_sign) *edge_sign = +1;
        return kNaN;
    }
    if (em_hi < 0.0) {
        if (sentinel) *sentinel = Sentinel::above_grid;
        if (edge_sign) *edge_sign = -1;
        return kNaN;
    }
    auto r = bisect([&](double b) { return sample_energy - interpolate_mean_energy(ref, b); },
                    lo, hi, tol, max_iter);
    if (iterations) *iterations = r.iterations;
    return r.root;
}

}  // namespace

EstimatorReport estimate_ml(const IsingModel& model, const SampleSet& samples,
                            const ReferenceStatistics& ref, const EstimatorOptions& options) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    EstimatorReport report;
    report.method = "ml";
    const std::vector<double> energies = sample_energies(model, samples);
    double e_mean = 0.0;
    for (double e : energies) e_mean += e;
    e_mean /= static_cast<double>(energies.size());

    report.bracket_lo = ref.beta_grid.front();
    report.bracket_hi = ref.beta_grid.back();
    report.beta_hat = ml_root(ref, e_mean, options.tol, options.max_iter, &report.sentinel,
                              &report.edge_sign, &report.root_iterations);
    for (std::size_t k = 0; k < ref.beta_grid.size(); ++k)
        report.objective_curve.push_back(
            {ref.beta_grid[k], e_mean - ref.mean_energy[k], kNaN});

    if (report.sentinel != Sentinel::none || !options.with_uncertainty) return report;

    const int n = samples.size();
    // out-of-bracket resamples are clamped to the grid hull; they only occur
    // when the estimate sits essentially on the edge
    auto root_of_subset = [&](std::span<const int> idx) {
        const double e = mean_over(energies, idx);
        Sentinel s = Sentinel::none;
        double b = ml_root(ref, e, options.tol, options.max_iter, &s, nullptr, nullptr);
        if (s == Sentinel::below_grid) b = ref.beta_grid.front();
        if (s == Sentinel::above_grid) b = ref.beta_grid.back();
        return b;
    };
    report.bootstrap_se =
        bootstrap_se(n, options.bootstrap_resamples, options.resample_seed, root_of_subset);
    const int blocks = std::min(options.jackknife_blocks, n);
    if (n >= 10) {
        auto jk = jackknife_bias_correct(n, blocks, root_of_subset);
        report.jackknife_bias = jk.bias;
    }
    return report;
}

// ---------------------------------------------------------------------------
// maximum log-pseudo-likelihood

namespace {

// Distinct u = x_i zeta_i values with multiplicities. RAN1/AC3 collapse to a
// handful of values, which makes EM evaluation and bootstrapping cheap.
struct UTable {
    std::vector<double> values;
    std::vector<double> counts;          // total multiplicity per value
    std::vector<std::vector<int>> per_sample;  // per sample: count per value index
    bool binned = false;

    double em(double beta) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            acc += counts[k] * values[k] * logistic(2.0 * beta * values[k]);
        return acc;
    }
};

UTable build_u_table(const IsingModel& model, const SampleSet& samples) {
    const int n = samples.size();
    const int n_spins = samples.n_spins();
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(n) * n_spins);
    SpinState tmp(n_spins);
    for (int k = 0; k < n; ++k) {
        auto row = samples.state(k);
        std::copy(row.begin(), row.end(), tmp.begin());
        const auto zeta = model.effective_fields(tmp);
        for (int i = 0; i < n_spins; ++i) all.push_back(tmp[i] * zeta[i]);
    }
    std::vector<double> sorted(all);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    UTable table;
    table.values = sorted;
    table.counts.assign(sorted.size(), 0.0);
    table.binned = sorted.size() <= 512;
    if (table.binned) table.per_sample.assign(n, std::vector<int>(sorted.size(), 0));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n_spins; ++i) {
            const double u = all[static_cast<std::size_t>(k) * n_spins + i];
            const auto it = std::lower_bound(sorted.begin(), sorted.end(), u);
            const std::size_t idx = static_cast<std::size_t>(it - sorted.begin());
            table.counts[idx] += 1.0;
            if (table.binned) ++table.per_sample[k][idx];
        }
    }
    return table;
}

struct MlplRoot {
    double root = kNaN;
    Sentinel sentinel = Sentinel::none;
    int edge_sign = 0;
    double bracket_lo = kNaN, bracket_hi = kNaN;
    int iterations = 0;
};

template <typename Em>
MlplRoot mlpl_root(Em&& em, bool any_positive, bool any_negative,
                   const EstimatorOptions& options) {
    MlplRoot out;
    if (!any_positive) {
        // every local move is downhill; EM < 0 for all beta
        out.sentinel = Sentinel::plus_infinity;
        out.edge_sign = -1;
        return out;
    }
    if (!any_negative) {
        out.sentinel = Sentinel::minus_infinity;
        out.edge_sign = +1;
        return out;
    }
    double lo = options.bracket_lo, hi = options.bracket_hi;
    int guard = 0;
    while (em(hi) < 0.0 && guard++ < 200) hi *= 2.0;
    if (em(lo) > 0.0) {
        lo = -options.bracket_lo;
        guard = 0;
        while (em(lo) > 0.0 && guard++ < 200) lo *= 2.0;
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    auto r = bisect(em, lo, hi, options.tol, options.max_iter);
    out.root = r.root;
    out.iterations = r.iterations;
    return out;
}

}  // namespace

double mlpl_energy_matching(const IsingModel& model, const SampleSet& samples, double beta) {
    return build_u_table(model, samples).em(beta);
}

EstimatorReport estimate_mlpl(const IsingModel& model, const SampleSet& samples,
                              const EstimatorOptions& options) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    EstimatorReport report;
    report.method = "mlpl";
    const UTable table = build_u_table(model, samples);
    bool any_pos = false, any_neg = false;
    for (std::size_t k = 0; k < table.values.size(); ++k) {
        if (table.counts[k] <= 0.0) continue;
        any_pos = any_pos || table.values[k] > 0.0;
        any_neg = any_neg || table.values[k] < 0.0;
    }
    MlplRoot root = mlpl_root([&](double b) { return table.em(b); }, any_pos, any_neg, options);
    report.beta_hat = root.root;
    report.sentinel = root.sentinel;
    report.edge_sign = root.edge_sign;
    report.bracket_lo = root.bracket_lo;
    report.bracket_hi = root.bracket_hi;
    report.root_iterations = root.iterations;
    if (report.sentinel != Sentinel::none || !options.with_uncertainty) return report;

    const int n = samples.size();
    const std::size_t n_values = table.values.size();
    auto root_of_subset = [&](std::span<const int> idx) {
        std::vector<double> counts(n_values, 0.0);
        if (table.binned) {
            for (int k : idx)
                for (std::size_t v = 0; v < n_values; ++v)
                    counts[v] += table.per_sample[k][v];
        } else {
            // cannot happen: binned is forced below before resampling
            return report.beta_hat;
        }
        bool pos = false, neg = false;
        for (std::size_t v = 0; v < n_values; ++v) {
            if (counts[v] <= 0.0) continue;
            pos = pos || table.values[v] > 0.0;
            neg = neg || table.values[v] < 0.0;
        }
        auto em = [&](double b) {
            double acc = 0.0;
            for (std::size_t v = 0; v < n_values; ++v)
                acc += counts[v] * table.values[v] * logistic(2.0 * b * table.values[v]);
            return acc;
        };
        MlplRoot r = mlpl_root(em, pos, neg, options);
        // degenerate resamples collapse to the full-sample estimate
        return r.sentinel == Sentinel::none ? r.root : report.beta_hat;
    };
    if (table.binned) {
        report.bootstrap_se =
            bootstrap_se(n, options.bootstrap_resamples, options.resample_seed, root_of_subset);
        if (n >= 10) {
            auto jk =
                jackknife_bias_correct(n, std::min(options.jackknife_blocks, n), root_of_subset);
            report.jackknife_bias = jk.bias;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// curves

namespace {

void check_edge_alignment(const IsingModel& model, const ReferenceStatistics& ref) {
    const auto& a = model.edges();
    const auto& b = ref.edges;
    if (a.size() != b.size())
        throw std::invalid_argument("reference edges do not match the model");
    for (std::size_t e = 0; e < a.size(); ++e)
        if (a[e].i != b[e].i || a[e].j != b[e].j)
            throw std::invalid_argument("reference edges do not match the model");
}

double mse_against(const std::vector<double>& emp_corr, const std::vector<double>& ref_corr,
                   const std::vector<double>* emp_mag, const std::vector<double>* ref_mag) {
    double acc = 0.0;
    for (std::size_t e = 0; e < emp_corr.size(); ++e) {
        const double d = emp_corr[e] - ref_corr[e];
        acc += d * d;
    }
    std::size_t terms = emp_corr.size();
    if (emp_mag) {
        for (std::size_t i = 0; i < emp_mag->size(); ++i) {
            const double d = (*emp_mag)[i] - (*ref_mag)[i];
            acc += d * d;
        }
        terms += emp_mag->size();
    }
    return acc / static_cast<double>(terms);
}

}  // namespace

ObjectiveCurve mse_curve(const IsingModel& model, const SampleSet& samples,
                         const ReferenceStatistics& ref, bool with_se,
                         bool include_single_variable) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    check_edge_alignment(model, ref);
    const auto emp_corr = empirical_edge_correlations(model, samples);
    std::vector<double> emp_mag;
    if (include_single_variable) emp_mag = empirical_magnetizations(samples);

    const int n = samples.size();
    const std::size_t n_edges = model.edges().size();
    // per-sample products only materialize for jackknife SEs
    std::vector<std::int8_t> products;
    if (with_se) {
        products.resize(static_cast<std::size_t>(n) * n_edges);
        for (int k = 0; k < n; ++k) {
            auto row = samples.state(k);
            for (std::size_t e = 0; e < n_edges; ++e)
                products[static_cast<std::size_t>(k) * n_edges + e] =
                    static_cast<std::int8_t>(row[model.edges()[e].i] * row[model.edges()[e].j]);
        }
    }

    ObjectiveCurve curve;
    curve.reserve(ref.beta_grid.size());
    for (std::size_t b = 0; b < ref.beta_grid.size(); ++b) {
        const double value =
            mse_against(emp_corr, ref.edge_correlations[b],
                        include_single_variable ? &emp_mag : nullptr,
                        include_single_variable ? &ref.magnetizations[b] : nullptr);
        double se = kNaN;
        if (with_se && n >= 10 && !include_single_variable) {
            const auto& ref_corr = ref.edge_correlations[b];
            auto stat = [&](std::span<const int> idx) {
                double acc = 0.0;
                for (std::size_t e = 0; e < n_edges; ++e) {
                    double c = 0.0;
                    for (int k : idx)
                        c += products[static_cast<std::size_t>(k) * n_edges + e];
                    c /= static_cast<double>(idx.size());
                    const double d = c - ref_corr[e];
                    acc += d * d;
                }
                return acc / static_cast<double>(n_edges);
            };
            se = jackknife_bias_correct(n, std::min(50, n), stat).se;
        }
        curve.push_back({ref.beta_grid[b], value, se});
    }
    return curve;
}

std::vector<double> interior_local_minima(const ObjectiveCurve& curve) {
    std::vector<double> minima;
    for (std::size_t k = 1; k + 1 < curve.size(); ++k)
        if (curve[k].value < curve[k - 1].value && curve[k].value < curve[k + 1].value)
            minima.push_back(curve[k].beta);
    return minima;
}

namespace {

// vertex of the parabola through three points, clamped to [x0, x2]
double quadratic_refine(const ObjectiveCurve& curve, std::size_t k) {
    if (k == 0 || k + 1 >= curve.size()) return curve[k].beta;
    const double x0 = curve[k - 1].beta, x1 = curve[k].beta, x2 = curve[k + 1].beta;
    const double y0 = curve[k - 1].value, y1 = curve[k].value, y2 = curve[k + 1].value;
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den == 0.0) return x1;
    const double vertex = x1 - 0.5 * num / den;
    return std::clamp(vertex, x0, x2);
}

EstimatorReport curve_minimum(const ObjectiveCurve& curve, MinMode mode, const char* method) {
    if (curve.empty()) throw std::invalid_argument("empty objective curve");
    EstimatorReport report;
    report.method = method;
    report.objective_curve = curve;
    report.local_minima = interior_local_minima(curve);

    std::size_t global_idx = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
        if (curve[k].value < curve[global_idx].value) global_idx = k;

    std::size_t pick = global_idx;
    if (mode == MinMode::rightmost_local) {
        if (!report.local_minima.empty()) {
            const double target = report.local_minima.back();
            for (std::size_t k = 0; k < curve.size(); ++k)
                if (curve[k].beta == target) pick = k;
        } else {
            report.fallback_global = true;
        }
    }
    report.beta_hat = quadratic_refine(curve, pick);
    report.objective_at_min = curve[pick].value;
    report.bracket_lo = curve.front().beta;
    report.bracket_hi = curve.back().beta;
    return report;
}

}  // namespace

EstimatorReport estimate_min_mse(const ObjectiveCurve& curve, MinMode mode) {
    return curve_minimum(curve, mode, "min-mse");
}

ObjectiveCurve kl_curve(const IsingModel& model, const EmpiricalDistribution& dist,
                        const ReferenceStatistics& ref) {
    if (!ref.has_log_z())
        throw std::invalid_argument("KL curve needs a reference with log Z");
    const double entropy = dist.entropy();
    const double e_mean = dist.mean_energy(model);
    ObjectiveCurve curve;
    curve.reserve(ref.beta_grid.size());
    for (std::size_t b = 0; b < ref.beta_grid.size(); ++b)
        curve.push_back(
            {ref.beta_grid[b], -entropy + ref.beta_grid[b] * e_mean + ref.log_z[b], kNaN});
    return curve;
}

EstimatorReport estimate_min_kl(const ObjectiveCurve& curve) {
    return curve_minimum(curve, MinMode::global, "min-kl");
}

// ---------------------------------------------------------------------------
// resampling

JackknifeResult jackknife_bias_correct(
    int n_samples, int blocks, const std::function<double(std::span<const int>)>& statistic) {
    if (n_samples < 10) throw std::invalid_argument("jackknife needs at least 10 samples");
    if (blocks < 2 || blocks > n_samples)
        throw std::invalid_argument("jackknife blocks must be in [2, n_samples]");
    std::vector<int> all(n_samples);
    for (int k = 0; k < n_samples; ++k) all[k] = k;
    const double full = statistic(all);

    std::vector<double> leave_out(blocks);
    std::vector<int> kept;
    kept.reserve(n_samples);
    for (int b = 0; b < blocks; ++b) {
        const int lo = static_cast<int>(static_cast<long long>(n_samples) * b / blocks);
        const int hi = static_cast<int>(static_cast<long long>(n_samples) * (b + 1) / blocks);
        kept.clear();
        for (int k = 0; k < n_samples; ++k)
            if (k < lo || k >= hi) kept.push_back(k);
        leave_out[b] = statistic(kept);
    }
    double mean = 0.0;
    for (double v : leave_out) mean += v;
    mean /= static_cast<double>(blocks);

    JackknifeResult out;
    out.estimate = full;
    out.corrected = blocks * full - (blocks - 1) * mean;
    out.bias = out.estimate - out.corrected;
    double var = 0.0;
    for (double v : leave_out) var += (v - mean) * (v - mean);
    out.se = std::sqrt(var * static_cast<double>(blocks - 1) / blocks);
    return out;
}

double bootstrap_se(int n_samples, int resamples, std::uint64_t seed,
                    const std::function<double(std::span<const int>)>& statistic) {
    if (n_samples < 2) throw std::invalid_argument("bootstrap needs at least 2 samples");
    Xoshiro256pp rng(seed);
    std::vector<int> idx(n_samples);
    std::vector<double> draws(resamples);
    for (int r = 0; r < resamples; ++r) {
        for (int k = 0; k < n_samples; ++k)
            idx[k] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_samples)));
        draws[r] = statistic(idx);
    }
    return sd(draws);
}

// ---------------------------------------------------------------------------
// beta-coupled post-processing curves

ObjectiveCurve curve_with_postprocessing(const IsingModel& model, const SampleSet& samples,
                                         const ReferenceStatistics& ref,
                                         const Coloring& coloring, int n_sweeps,
                                         std::uint64_t seed, CurveObjective objective) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    check_edge_alignment(model, ref);
    if (objective == CurveObjective::kl && !ref.has_log_z())
        throw std::invalid_argument("KL curve needs a reference with log Z");
    ObjectiveCurve curve;
    curve.reserve(ref.beta_grid.size());
    for (std::size_t g = 0; g < ref.beta_grid.size(); ++g) {
        const double beta = ref.beta_grid[g];
        SampleSet pp = postprocess(samples, model, beta, n_sweeps, coloring,
                                   derive_stream_seed(seed, g));
        double value;
        if (objective == CurveObjective::mse) {
            const auto emp = empirical_edge_correlations(model, pp);
            value = mse_against(emp, ref.edge_correlations[g], nullptr, nullptr);
        } else {
            const auto dist = EmpiricalDistribution::from_samples(pp);
            value = -dist.entropy() + beta * dist.mean_energy(model) + ref.log_z[g];
        }
        curve.push_back({beta, value, kNaN});
    }
    return curve;
}

}  // namespace tempest
