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

#include "tempest/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tempest/rng.hpp"
#include "tempest/sampling.hpp"

namespace tempest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string ref_method_name(RefMethod m) {
    switch (m) {
        case RefMethod::exact_enum: return "exact-enum";
        case RefMethod::exact_dp: return "exact-dp";
        case RefMethod::pt: return "pt";
    }
    return "?";
}

RefMethod ref_method_from_name(const std::string& name) {
    if (name == "exact-enum" || name == "enum") return RefMethod::exact_enum;
    if (name == "exact-dp" || name == "dp") return RefMethod::exact_dp;
    if (name == "pt") return RefMethod::pt;
    throw std::invalid_argument("unknown reference method: " + name);
}

bool ReferenceStatistics::has_log_z() const {
    return !log_z.empty() && std::isfinite(log_z.front());
}

int ReferenceStatistics::grid_index_of(double beta, double tol) const {
    for (std::size_t k = 0; k < beta_grid.size(); ++k)
        if (std::abs(beta_grid[k] - beta) <= tol) return static_cast<int>(k);
    return -1;
}

std::vector<double> default_beta_grid(double beta_t, double step) {
    if (beta_t < 0 || step <= 0) throw std::invalid_argument("bad grid parameters");
    const double top = 1.5 * beta_t;
    const int count = std::max(1, static_cast<int>(std::ceil(top / step - 1e-9))) + 1;
    std::vector<double> grid(count);
    for (int k = 0; k < count; ++k) grid[k] = k * step;
    return grid;
}

// ---------------------------------------------------------------------------
// enumeration

namespace {

// Gray-code walk over all 2^N states with incremental energy and edge-product
// maintenance; calls visit(state_bits, energy, products, spins).
template <typename Visit>
void enumerate_states(const IsingModel& model, Visit&& visit) {
    const int n = model.n_spins();
    const std::uint64_t n_states = std::uint64_t{1} << n;
    SpinState spins(n, -1);
    std::vector<std::int8_t> prod(model.edges().size(), 1);  // all-down products
    // per-spin incident edge lists
    std::vector<std::vector<int>> incident(n);
    for (std::size_t e = 0; e < model.edges().size(); ++e) {
        incident[model.edges()[e].i].push_back(static_cast<int>(e));
        incident[model.edges()[e].j].push_back(static_cast<int>(e));
    }
    double energy = model.energy(spins);
    std::uint64_t bits = 0;
    visit(bits, energy, prod, spins);
    for (std::uint64_t k = 1; k < n_states; ++k) {
        const int t = std::countr_zero(k);
        energy += -2.0 * spins[t] * model.effective_field(spins, t);
        spins[t] = static_cast<std::int8_t>(-spins[t]);
        bits ^= std::uint64_t{1} << t;
        for (int e : incident[t]) prod[e] = static_cast<std::int8_t>(-prod[e]);
        visit(bits, energy, prod, spins);
    }
}

}  // namespace

ReferenceStatistics exact_stats_enumeration(const IsingModel& model,
                                            const std::vector<double>& beta_grid,
                                            int n_spins_cap) {
    if (beta_grid.empty()) throw std::invalid_argument("empty beta grid");
    const int n = model.n_spins();
    if (n > n_spins_cap)
        throw std::invalid_argument("model exceeds enumeration cap of " +
                                    std::to_string(n_spins_cap) + " spins");
    const std::size_t n_betas = beta_grid.size();
    const std::size_t n_edges = model.edges().size();

    double e_min = std::numeric_limits<double>::infinity();
    enumerate_states(model, [&](std::uint64_t, double energy, const auto&, const auto&) {
        e_min = std::min(e_min, energy);
    });

    std::vector<double> z(n_betas, 0.0), se(n_betas, 0.0);
    std::vector<std::vector<double>> scorr(n_betas, std::vector<double>(n_edges, 0.0));
    std::vector<std::vector<double>> smag(n_betas, std::vector<double>(n, 0.0));
    enumerate_states(model, [&](std::uint64_t, double energy,
                                const std::vector<std::int8_t>& prod, const SpinState& spins) {
        for (std::size_t b = 0; b < n_betas; ++b) {
            const double w = std::exp(-beta_grid[b] * (energy - e_min));
            z[b] += w;
            se[b] += energy * w;
            auto& sc = scorr[b];
            for (std::size_t e = 0; e < n_edges; ++e) sc[e] += prod[e] * w;
            auto& sm = smag[b];
            for (int i = 0; i < n; ++i) sm[i] += spins[i] * w;
        }
    });

    ReferenceStatistics ref;
    ref.method = RefMethod::exact_enum;
    ref.method_detail = "enum";
    ref.model_label = model.metadata().label;
    ref.model_hash = model.content_hash();
    ref.edges = model.edges();
    ref.beta_grid = beta_grid;
    for (std::size_t b = 0; b < n_betas; ++b) {
        ref.log_z.push_back(-beta_grid[b] * e_min + std::log(z[b]));
        ref.mean_energy.push_back(se[b] / z[b]);
        std::vector<double> corr(n_edges);
        for (std::size_t e = 0; e < n_edges; ++e) corr[e] = scorr[b][e] / z[b];
        ref.edge_correlations.push_back(std::move(corr));
        std::vector<double> mag(n);
        for (int i = 0; i < n; ++i) mag[i] = smag[b][i] / z[b];
        ref.magnetizations.push_back(std::move(mag));
    }
    return ref;
}

SampleSet sample_exact_enum(const IsingModel& model, double beta, int n_samples,
                            std::uint64_t seed, int n_spins_cap) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    const int n = model.n_spins();
    if (n > n_spins_cap)
        throw std::invalid_argument("model exceeds enumeration cap of " +
                                    std::to_string(n_spins_cap) + " spins");
    const std::uint64_t n_states = std::uint64_t{1} << n;
    std::vector<double> energy(n_states);
    double e_min = std::numeric_limits<double>::infinity();
    enumerate_states(model, [&](std::uint64_t bits, double e, const auto&, const auto&) {
        energy[bits] = e;
        e_min = std::min(e_min, e);
    });
    // cumulative weights, shifted by the ground state for stability
    std::vector<double> cdf(n_states);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < n_states; ++s) {
        acc += std::exp(-beta * (energy[s] - e_min));
        cdf[s] = acc;
    }
    char sched[64];
    std::snprintf(sched, sizeof sched, "beta=%.6g", beta);
    SampleSet out(model.metadata().label, n, SampleMeta{"exact-enum", sched, seed, {}});
    out.resize(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        Xoshiro256pp rng = Xoshiro256pp::substream(seed, static_cast<std::uint64_t>(k));
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t bits =
            it == cdf.end() ? n_states - 1 : static_cast<std::uint64_t>(it - cdf.begin());
        auto row = out.state(k);
        for (int i = 0; i < n; ++i) row[i] = (bits >> i) & 1 ? 1 : -1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// parallel tempering estimates

ReferenceStatistics pt_stats(const IsingModel& model, const std::vector<double>& beta_grid,
                             const PtStatsOptions& options, std::uint64_t seed) {
    if (beta_grid.empty()) throw std::invalid_argument("empty beta grid");
    for (std::size_t k = 1; k < beta_grid.size(); ++k)
        if (beta_grid[k] <= beta_grid[k - 1])
            throw std::invalid_argument("beta grid must be strictly increasing");
    const int burn_in = static_cast<int>(options.rounds * options.burn_in_fraction);
    const int recorded = options.rounds - burn_in;
    if (recorded < 10) throw std::invalid_argument("pt budget too small for burn-in");

    // The ladder is the grid plus enough hot rungs for mixing and for the
    // thermodynamic integration to start at 0.
    std::vector<double> ladder = beta_grid;
    if (ladder.front() > 0.0) {
        std::vector<double> hot;
        for (double b = 0.0; b < ladder.front() - 1e-12; b += 0.05) hot.push_back(b);
        ladder.insert(ladder.begin(), hot.begin(), hot.end());
    }
    const int n_rungs = static_cast<int>(ladder.size());
    const std::size_t n_edges = model.edges().size();
    const int n = model.n_spins();

    const int blocks = std::min(options.bootstrap_blocks, recorded);
    // block partial sums: energy, per-edge products, per-spin values
    std::vector<std::vector<double>> e_sum(n_rungs, std::vector<double>(blocks, 0.0));
    std::vector<std::vector<double>> corr_sum(n_rungs, std::vector<double>(blocks * n_edges, 0.0));
    std::vector<std::vector<double>> mag_sum(n_rungs, std::vector<double>(blocks * n, 0.0));
    std::vector<long long> block_count(blocks, 0);

    Coloring coloring = greedy_coloring(model);
    run_pt_observed(model, ladder, options.sweeps_per_exchange, options.rounds, burn_in, seed,
                    coloring,
                    [&](int rec, const std::vector<SpinState>& states,
                        const std::vector<double>& energies) {
                        const int blk = static_cast<int>(
                            static_cast<long long>(rec) * blocks / recorded);
                        ++block_count[blk];
                        for (int r = 0; r < n_rungs; ++r) {
                            e_sum[r][blk] += energies[r];
                            const SpinState& x = states[r];
                            double* cs = corr_sum[r].data() + std::size_t(blk) * n_edges;
                            for (std::size_t e = 0; e < n_edges; ++e)
                                cs[e] += x[model.edges()[e].i] * x[model.edges()[e].j];
                            double* ms = mag_sum[r].data() + std::size_t(blk) * n;
                            for (int i = 0; i < n; ++i) ms[i] += x[i];
                        }
                    });
    // `blk` is recorded-round index scaled into [0, blocks); counts only
    // differ by one between blocks.

    auto rung_means = [&](const std::vector<int>& chosen_blocks, int r, double& e_mean,
                          std::vector<double>* corr, std::vector<double>* mag) {
        double esum = 0.0;
        long long cnt = 0;
        for (int blk : chosen_blocks) {
            esum += e_sum[r][blk];
            cnt += block_count[blk];
        }
        e_mean = esum / static_cast<double>(cnt);
        if (corr) {
            corr->assign(n_edges, 0.0);
            for (int blk : chosen_blocks) {
                const double* cs = corr_sum[r].data() + std::size_t(blk) * n_edges;
                for (std::size_t e = 0; e < n_edges; ++e) (*corr)[e] += cs[e];
            }
            for (auto& v : *corr) v /= static_cast<double>(cnt);
        }
        if (mag) {
            mag->assign(n, 0.0);
            for (int blk : chosen_blocks) {
                const double* ms = mag_sum[r].data() + std::size_t(blk) * n;
                for (int i = 0; i < n; ++i) (*mag)[i] += ms[i];
            }
            for (auto& v : *mag) v /= static_cast<double>(cnt);
        }
    };

    std::vector<int> all_blocks(blocks);
    for (int b = 0; b < blocks; ++b) all_blocks[b] = b;

    std::vector<double> ladder_energy(n_rungs);
    std::vector<std::vector<double>> ladder_corr(n_rungs), ladder_mag(n_rungs);
    for (int r = 0; r < n_rungs; ++r)
        rung_means(all_blocks, r, ladder_energy[r], &ladder_corr[r], &ladder_mag[r]);

    auto ti_log_z = [&](const std::vector<double>& energies, int upto) {
        // log Z(beta_k) = N log 2 - integral of <H> from 0, trapezoid on the ladder
        double integral = 0.0;
        for (int r = 1; r <= upto; ++r)
            integral +=
                0.5 * (energies[r] + energies[r - 1]) * (ladder[r] - ladder[r - 1]);
        return n * std::log(2.0) - integral;
    };

    // block bootstrap over exchange rounds, joint across rungs
    const int resamples = options.bootstrap_resamples;
    std::vector<std::vector<double>> boot_e(n_rungs, std::vector<double>(resamples));
    std::vector<std::vector<double>> boot_logz(n_rungs, std::vector<double>(resamples));
    std::vector<std::vector<double>> boot_corr;  // [rung][resample*n_edges]
    boot_corr.assign(n_rungs, std::vector<double>(std::size_t(resamples) * n_edges));
    Xoshiro256pp boot_rng = Xoshiro256pp::substream(seed, 0x626f6f74ULL);
    std::vector<int> chosen(blocks);
    std::vector<double> res_energy(n_rungs);
    std::vector<double> res_corr;
    for (int s = 0; s < resamples; ++s) {
        for (int b = 0; b < blocks; ++b)
            chosen[b] = static_cast<int>(boot_rng.next_below(blocks));
        for (int r = 0; r < n_rungs; ++r) {
            rung_means(chosen, r, res_energy[r], &res_corr, nullptr);
            boot_e[r][s] = res_energy[r];
            for (std::size_t e = 0; e < n_edges; ++e)
                boot_corr[r][std::size_t(s) * n_edges + e] = res_corr[e];
        }
        if (options.thermodynamic_integration)
            for (int r = 0; r < n_rungs; ++r) boot_logz[r][s] = ti_log_z(res_energy, r);
    }
    auto sd = [](const double* v, int count, double mean) {
        double acc = 0.0;
        for (int k = 0; k < count; ++k) acc += (v[k] - mean) * (v[k] - mean);
        return count > 1 ? std::sqrt(acc / (count - 1)) : 0.0;
    };
    auto mean_of = [](const double* v, int count) {
        double acc = 0.0;
        for (int k = 0; k < count; ++k) acc += v[k];
        return acc / count;
    };

    ReferenceStatistics ref;
    ref.method = RefMethod::pt;
    char detail[96];
    std::snprintf(detail, sizeof detail, "pt(rounds=%d,spe=%d,blocks=%d,ti=%d)", options.rounds,
                  options.sweeps_per_exchange, blocks,
                  options.thermodynamic_integration ? 1 : 0);
    ref.method_detail = detail;
    ref.model_label = model.metadata().label;
    ref.model_hash = model.content_hash();
    ref.edges = model.edges();
    ref.beta_grid = beta_grid;
    for (double beta : beta_grid) {
        int r = -1;
        for (int k = 0; k < n_rungs; ++k)
            if (std::abs(ladder[k] - beta) < 1e-12) { r = k; break; }
        ref.mean_energy.push_back(ladder_energy[r]);
        ref.edge_correlations.push_back(ladder_corr[r]);
        ref.magnetizations.push_back(ladder_mag[r]);
        ref.log_z.push_back(options.thermodynamic_integration ? ti_log_z(ladder_energy, r)
                                                              : kNaN);
        const double e_mean = mean_of(boot_e[r].data(), resamples);
        ref.mean_energy_se.push_back(sd(boot_e[r].data(), resamples, e_mean));
        if (options.thermodynamic_integration) {
            const double z_mean = mean_of(boot_logz[r].data(), resamples);
            ref.log_z_se.push_back(sd(boot_logz[r].data(), resamples, z_mean));
        } else {
            ref.log_z_se.push_back(kNaN);
        }
        std::vector<double> cse(n_edges);
        for (std::size_t e = 0; e < n_edges; ++e) {
            // per-edge bootstrap draws are strided in boot_corr
            double m = 0.0;
            for (int s = 0; s < resamples; ++s) m += boot_corr[r][std::size_t(s) * n_edges + e];
            m /= resamples;
            double acc = 0.0;
            for (int s = 0; s < resamples; ++s) {
                const double d = boot_corr[r][std::size_t(s) * n_edges + e] - m;
                acc += d * d;
            }
            cse[e] = resamples > 1 ? std::sqrt(acc / (resamples - 1)) : 0.0;
        }
        ref.corr_se.push_back(std::move(cse));
    }
    return ref;
}

// ---------------------------------------------------------------------------
// interpolation

namespace {

struct Segment {
    int k;      // left grid index
    double t;   // position in [0, 1]
};

Segment find_segment(const ReferenceStatistics& ref, double beta) {
    const auto& grid = ref.beta_grid;
    if (grid.empty()) throw std::invalid_argument("reference has an empty grid");
    const double lo = grid.front(), hi = grid.back();
    if (beta < lo - 1e-12 || beta > hi + 1e-12)
        throw std::out_of_range("beta outside the reference grid hull");
    if (grid.size() == 1) return {0, 0.0};
    beta = std::clamp(beta, lo, hi);
    auto it = std::upper_bound(grid.begin(), grid.end(), beta);
    int k = static_cast<int>(it - grid.begin()) - 1;
    k = std::clamp(k, 0, static_cast<int>(grid.size()) - 2);
    const double t = (beta - grid[k]) / (grid[k + 1] - grid[k]);
    return {k, t};
}

}  // namespace

double interpolate_mean_energy(const ReferenceStatistics& ref, double beta) {
    const Segment s = find_segment(ref, beta);
    if (ref.beta_grid.size() == 1) return ref.mean_energy[0];
    return ref.mean_energy[s.k] + (ref.mean_energy[s.k + 1] - ref.mean_energy[s.k]) * s.t;
}

double interpolate_log_z(const ReferenceStatistics& ref, double beta) {
    if (!ref.has_log_z()) throw std::runtime_error("reference does not provide log Z");
    const Segment s = find_segment(ref, beta);
    if (ref.beta_grid.size() == 1) return ref.log_z[0];
    const double h = ref.beta_grid[s.k + 1] - ref.beta_grid[s.k];
    const double z0 = ref.log_z[s.k], z1 = ref.log_z[s.k + 1];
    const double m0 = -ref.mean_energy[s.k], m1 = -ref.mean_energy[s.k + 1];
    const double t = s.t, t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * z0 + (t3 - 2 * t2 + t) * h * m0 +
           (-2 * t3 + 3 * t2) * z1 + (t3 - t2) * h * m1;
}

RefPoint interpolate_reference(const ReferenceStatistics& ref, double beta) {
    const Segment s = find_segment(ref, beta);
    RefPoint out;
    out.mean_energy = interpolate_mean_energy(ref, beta);
    out.log_z = ref.has_log_z() ? interpolate_log_z(ref, beta) : kNaN;
    const std::size_t n_edges = ref.edges.size();
    out.correlations.resize(n_edges);
    if (ref.beta_grid.size() == 1) {
        out.correlations = ref.edge_correlations[0];
        return out;
    }
    const auto& c0 = ref.edge_correlations[s.k];
    const auto& c1 = ref.edge_correlations[s.k + 1];
    for (std::size_t e = 0; e < n_edges; ++e)
        out.correlations[e] = c0[e] + (c1[e] - c0[e]) * s.t;
    return out;
}

}  // namespace tempest
