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
//
// Bucket elimination over log-space factor tables. One bucket per variable;
// a bucket's clique is [v, u1..uk] with the u's ordered by elimination
// position, laid out as bits [0, 1..k] of the table index (bit set = spin up).
// Eliminating bit 0 therefore reduces contiguous pairs, and the message over
// [u1..uk] reuses the same bit layout shifted down by one.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "tempest/reference.hpp"
#include "tempest/rng.hpp"

namespace tempest {

namespace {

using AdjSets = std::vector<std::set<int>>;

AdjSets adjacency_sets(const IsingModel& model) {
    AdjSets adj(model.n_spins());
    for (const Edge& e : model.edges()) {
        adj[e.i].insert(e.j);
        adj[e.j].insert(e.i);
    }
    return adj;
}

int simulate_width(AdjSets adj, const std::vector<int>& order) {
    int width = 0;
    std::vector<char> gone(adj.size(), 0);
    for (int v : order) {
        std::vector<int> nbrs;
        for (int u : adj[v])
            if (!gone[u]) nbrs.push_back(u);
        width = std::max(width, static_cast<int>(nbrs.size()));
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                adj[nbrs[a]].insert(nbrs[b]);
                adj[nbrs[b]].insert(nbrs[a]);
            }
        gone[v] = 1;
        for (int u : nbrs) adj[u].erase(v);
    }
    return width;
}

std::vector<int> min_fill_order(AdjSets adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> order;
    order.reserve(n);
    std::vector<char> gone(n, 0);
    for (int step = 0; step < n; ++step) {
        int best = -1;
        long best_fill = std::numeric_limits<long>::max();
        std::size_t best_deg = 0;
        for (int v = 0; v < n; ++v) {
            if (gone[v]) continue;
            long fill = 0;
            for (auto it = adj[v].begin(); it != adj[v].end(); ++it) {
                auto jt = it;
                for (++jt; jt != adj[v].end(); ++jt)
                    if (!adj[*it].count(*jt)) ++fill;
            }
            if (fill < best_fill || (fill == best_fill && adj[v].size() < best_deg)) {
                best = v;
                best_fill = fill;
                best_deg = adj[v].size();
            }
        }
        order.push_back(best);
        std::vector<int> nbrs(adj[best].begin(), adj[best].end());
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                adj[nbrs[a]].insert(nbrs[b]);
                adj[nbrs[b]].insert(nbrs[a]);
            }
        gone[best] = 1;
        for (int u : nbrs) adj[u].erase(best);
        adj[best].clear();
    }
    return order;
}

std::vector<int> choose_order(const IsingModel& model, int& width_out) {
    AdjSets adj = adjacency_sets(model);
    std::vector<int> natural(model.n_spins());
    std::iota(natural.begin(), natural.end(), 0);
    const int natural_width = simulate_width(adj, natural);
    std::vector<int> fill = min_fill_order(adj);
    const int fill_width = simulate_width(adj, fill);
    if (fill_width < natural_width) {
        width_out = fill_width;
        return fill;
    }
    width_out = natural_width;
    return natural;
}

struct PairFactor {
    int bit_a;
    int bit_b;
    double weight;
    int edge_index;
};

struct SingleFactor {
    int bit;
    double field;
};

struct Bucket {
    int var = -1;
    std::vector<int> clique;  // [var, u1..uk], u's by elimination position
    std::vector<PairFactor> pair_factors;
    std::vector<SingleFactor> single_factors;
    int parent = -1;                 // bucket receiving this bucket's message
    std::vector<int> gather_bits;    // scope var j -> bit position in parent clique
    std::vector<int> children;
};

// softmax over a pair sharing one exp with the log-sum-exp
struct PairReduce {
    double lse;
    double p0;
    double p1;
};

inline PairReduce reduce_pair(double a0, double a1) {
    if (a0 >= a1) {
        const double e = std::exp(a1 - a0);
        return {a0 + std::log1p(e), 1.0 / (1.0 + e), e / (1.0 + e)};
    }
    const double e = std::exp(a0 - a1);
    return {a1 + std::log1p(e), e / (1.0 + e), 1.0 / (1.0 + e)};
}

class DpSolver {
public:
    DpSolver(const IsingModel& model, std::vector<int> order, int width_cap)
        : model_(&model) {
        const int n = model.n_spins();
        if (order.empty()) {
            order_ = choose_order(model, width_);
        } else {
            std::vector<char> seen(n, 0);
            if (static_cast<int>(order.size()) != n)
                throw std::invalid_argument("elimination order must cover every spin");
            for (int v : order) {
                if (v < 0 || v >= n || seen[v])
                    throw std::invalid_argument("elimination order is not a permutation");
                seen[v] = 1;
            }
            order_ = std::move(order);
            width_ = simulate_width(adjacency_sets(model), order_);
        }
        if (width_ > width_cap)
            throw std::runtime_error("elimination width " + std::to_string(width_) +
                                     " exceeds cap " + std::to_string(width_cap));

        position_.assign(n, -1);
        for (int t = 0; t < n; ++t) position_[order_[t]] = t;

        // build cliques with fill-in
        AdjSets adj = adjacency_sets(model);
        buckets_.resize(n);
        std::vector<char> gone(n, 0);
        for (int t = 0; t < n; ++t) {
            const int v = order_[t];
            Bucket& b = buckets_[t];
            b.var = v;
            std::vector<int> nbrs;
            for (int u : adj[v])
                if (!gone[u]) nbrs.push_back(u);
            std::sort(nbrs.begin(), nbrs.end(),
                      [&](int a, int c) { return position_[a] < position_[c]; });
            b.clique.push_back(v);
            b.clique.insert(b.clique.end(), nbrs.begin(), nbrs.end());
            for (std::size_t a = 0; a < nbrs.size(); ++a)
                for (std::size_t c = a + 1; c < nbrs.size(); ++c) {
                    adj[nbrs[a]].insert(nbrs[c]);
                    adj[nbrs[c]].insert(nbrs[a]);
                }
            gone[v] = 1;
            for (int u : nbrs) adj[u].erase(v);
            if (!nbrs.empty()) {
                b.parent = position_[nbrs[0]];
                buckets_[b.parent].children.push_back(t);
            }
        }
        // message gather maps: scope var -> bit in parent clique
        for (int t = 0; t < n; ++t) {
            Bucket& b = buckets_[t];
            if (b.parent < 0) continue;
            const auto& pc = buckets_[b.parent].clique;
            for (std::size_t j = 1; j < b.clique.size(); ++j) {
                auto it = std::find(pc.begin(), pc.end(), b.clique[j]);
                if (it == pc.end())
                    throw std::logic_error("message scope not contained in parent clique");
                b.gather_bits.push_back(static_cast<int>(it - pc.begin()));
            }
        }
        // factor placement: every factor goes to the bucket of its
        // earliest-eliminated variable
        const auto& edges = model.edges();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const int ti = position_[edges[e].i];
            const int tj = position_[edges[e].j];
            const int t = std::min(ti, tj);
            Bucket& b = buckets_[t];
            int bit_a = -1, bit_b = -1;
            for (std::size_t k = 0; k < b.clique.size(); ++k) {
                if (b.clique[k] == edges[e].i) bit_a = static_cast<int>(k);
                if (b.clique[k] == edges[e].j) bit_b = static_cast<int>(k);
            }
            b.pair_factors.push_back({bit_a, bit_b, edges[e].weight, static_cast<int>(e)});
        }
        const auto& fields = model.fields();
        for (int i = 0; i < n; ++i)
            if (fields[i] != 0.0) buckets_[position_[i]].single_factors.push_back({0, fields[i]});
    }

    int width() const { return width_; }
    const std::vector<int>& order() const { return order_; }

    struct Eval {
        double log_z = 0.0;
        double mean_energy = 0.0;
        std::vector<double> edge_corr;
        std::vector<double> magnetization;
    };

    double log_z_only(double beta) {
        forward(beta, false, false);
        return log_z_;
    }

    Eval evaluate(double beta, bool with_marginals) {
        forward(beta, true, with_marginals);
        Eval out;
        out.log_z = log_z_;
        out.mean_energy = mean_energy_;
        if (with_marginals) backward(out);
        return out;
    }

    SampleSet sample(double beta, int n_samples, std::uint64_t seed) {
        forward(beta, false, true);
        const int n = model_->n_spins();
        char sched[64];
        std::snprintf(sched, sizeof sched, "beta=%.6g", beta);
        SampleSet out(model_->metadata().label, n, SampleMeta{"exact-dp", sched, seed, {}});
        out.resize(n_samples);
        SpinState state(n);
        for (int k = 0; k < n_samples; ++k) {
            Xoshiro256pp rng = Xoshiro256pp::substream(seed, static_cast<std::uint64_t>(k));
            for (int t = n - 1; t >= 0; --t) {
                const Bucket& b = buckets_[t];
                std::size_t m = 0;
                for (std::size_t j = 1; j < b.clique.size(); ++j)
                    m |= static_cast<std::size_t>(state[b.clique[j]] > 0 ? 1 : 0) << (j - 1);
                const double a0 = tables_[t][m << 1];
                const double a1 = tables_[t][(m << 1) | 1];
                const double p_up = reduce_pair(a0, a1).p1;
                state[b.var] = rng.next_double() < p_up ? 1 : -1;
            }
            auto row = out.state(k);
            std::copy(state.begin(), state.end(), row.begin());
        }
        return out;
    }

private:
    void forward(double beta, bool with_energy, bool keep_tables) {
        const int n = model_->n_spins();
        msg_logw_.resize(n);
        msg_e_.resize(n);
        if (keep_tables) tables_.resize(n);
        log_z_ = 0.0;
        mean_energy_ = 0.0;
        std::vector<double> logw, evals;
        for (int t = 0; t < n; ++t) {
            const Bucket& b = buckets_[t];
            const std::size_t size = std::size_t{1} << b.clique.size();
            evals.assign(size, 0.0);
            for (const PairFactor& f : b.pair_factors) {
                for (std::size_t a = 0; a < size; ++a) {
                    const int sign = (((a >> f.bit_a) ^ (a >> f.bit_b)) & 1) ? -1 : 1;
                    evals[a] += f.weight * sign;
                }
            }
            for (const SingleFactor& f : b.single_factors) {
                for (std::size_t a = 0; a < size; ++a)
                    evals[a] += ((a >> f.bit) & 1) ? f.field : -f.field;
            }
            logw.assign(size, 0.0);
            for (std::size_t a = 0; a < size; ++a) logw[a] = -beta * evals[a];
            for (int c : b.children) {
                const Bucket& cb = buckets_[c];
                const auto& gb = cb.gather_bits;
                const auto& ml = msg_logw_[c];
                const auto& me = msg_e_[c];
                if (with_energy) {
                    for (std::size_t a = 0; a < size; ++a) {
                        std::size_t m = 0;
                        for (std::size_t j = 0; j < gb.size(); ++j)
                            m |= ((a >> gb[j]) & 1) << j;
                        logw[a] += ml[m];
                        evals[a] += me[m];
                    }
                } else {
                    for (std::size_t a = 0; a < size; ++a) {
                        std::size_t m = 0;
                        for (std::size_t j = 0; j < gb.size(); ++j)
                            m |= ((a >> gb[j]) & 1) << j;
                        logw[a] += ml[m];
                    }
                }
            }
            const std::size_t half = size >> 1;
            msg_logw_[t].resize(half);
            msg_e_[t].assign(with_energy ? half : 0, 0.0);
            for (std::size_t m = 0; m < half; ++m) {
                const PairReduce r = reduce_pair(logw[2 * m], logw[2 * m + 1]);
                msg_logw_[t][m] = r.lse;
                if (with_energy)
                    msg_e_[t][m] = r.p0 * evals[2 * m] + r.p1 * evals[2 * m + 1];
            }
            if (keep_tables) tables_[t] = std::move(logw);
            if (b.clique.size() == 1) {
                log_z_ += msg_logw_[t][0];
                if (with_energy) mean_energy_ += msg_e_[t][0];
            }
        }
    }

    void backward(Eval& out) {
        const int n = model_->n_spins();
        out.edge_corr.assign(model_->edges().size(), 0.0);
        out.magnetization.assign(n, 0.0);
        ext_.assign(n, {});
        std::vector<double> belief, marg_max, marg_sum;
        for (int t = n - 1; t >= 0; --t) {
            const Bucket& b = buckets_[t];
            const std::size_t size = std::size_t{1} << b.clique.size();
            belief.resize(size);
            const std::vector<double>& table = tables_[t];
            if (b.parent < 0 || ext_[t].empty()) {
                std::copy(table.begin(), table.end(), belief.begin());
            } else {
                for (std::size_t a = 0; a < size; ++a) belief[a] = table[a] + ext_[t][a >> 1];
            }
            // normalize within the clique
            double mx = belief[0];
            for (std::size_t a = 1; a < size; ++a) mx = std::max(mx, belief[a]);
            double z = 0.0;
            for (std::size_t a = 0; a < size; ++a) z += std::exp(belief[a] - mx);
            const double log_zb = mx + std::log(z);
            // clique marginal statistics
            double mag = 0.0;
            for (std::size_t a = 0; a < size; ++a) {
                const double p = std::exp(belief[a] - log_zb);
                mag += (a & 1) ? p : -p;
            }
            out.magnetization[b.var] = mag;
            for (const PairFactor& f : b.pair_factors) {
                double corr = 0.0;
                for (std::size_t a = 0; a < size; ++a) {
                    const double p = std::exp(belief[a] - log_zb);
                    corr += (((a >> f.bit_a) ^ (a >> f.bit_b)) & 1) ? -p : p;
                }
                out.edge_corr[f.edge_index] = corr;
            }
            // downward messages to children
            for (int c : b.children) {
                const Bucket& cb = buckets_[c];
                const auto& gb = cb.gather_bits;
                const std::size_t csize = std::size_t{1} << gb.size();
                marg_max.assign(csize, -std::numeric_limits<double>::infinity());
                marg_sum.assign(csize, 0.0);
                for (std::size_t a = 0; a < size; ++a) {
                    std::size_t m = 0;
                    for (std::size_t j = 0; j < gb.size(); ++j)
                        m |= ((a >> gb[j]) & 1) << j;
                    marg_max[m] = std::max(marg_max[m], belief[a]);
                }
                for (std::size_t a = 0; a < size; ++a) {
                    std::size_t m = 0;
                    for (std::size_t j = 0; j < gb.size(); ++j)
                        m |= ((a >> gb[j]) & 1) << j;
                    marg_sum[m] += std::exp(belief[a] - marg_max[m]);
                }
                ext_[c].resize(csize);
                for (std::size_t m = 0; m < csize; ++m)
                    ext_[c][m] = marg_max[m] + std::log(marg_sum[m]) - msg_logw_[c][m];
            }
        }
    }

    const IsingModel* model_;
    std::vector<int> order_;
    std::vector<int> position_;
    std::vector<Bucket> buckets_;
    int width_ = 0;

    std::vector<std::vector<double>> msg_logw_;
    std::vector<std::vector<double>> msg_e_;
    std::vector<std::vector<double>> tables_;
    std::vector<std::vector<double>> ext_;
    double log_z_ = 0.0;
    double mean_energy_ = 0.0;
};

ReferenceStatistics dp_stats_impl(const IsingModel& model, std::vector<int> order,
                                  const std::vector<double>& beta_grid,
                                  const DpOptions& options) {
    if (beta_grid.empty()) throw std::invalid_argument("empty beta grid");
    DpSolver solver(model, std::move(order), options.width_cap);
    ReferenceStatistics ref;
    ref.method = RefMethod::exact_dp;
    ref.model_label = model.metadata().label;
    ref.model_hash = model.content_hash();
    ref.edges = model.edges();
    ref.beta_grid = beta_grid;
    char detail[96];
    std::snprintf(detail, sizeof detail, "dp(width=%d,energy=%s)", solver.width(),
                  options.finite_diff_energy ? "finite-diff" : "weighted-pass");
    ref.method_detail = detail;
    for (double beta : beta_grid) {
        auto eval = solver.evaluate(beta, true);
        if (!std::isfinite(eval.log_z)) throw std::runtime_error("non-finite table entry");
        ref.log_z.push_back(eval.log_z);
        if (options.finite_diff_energy) {
            const double d = options.finite_diff_delta;
            ref.mean_energy.push_back(
                -(solver.log_z_only(beta + d) - solver.log_z_only(beta - d)) / (2.0 * d));
        } else {
            ref.mean_energy.push_back(eval.mean_energy);
        }
        ref.edge_correlations.push_back(std::move(eval.edge_corr));
        ref.magnetizations.push_back(std::move(eval.magnetization));
    }
    return ref;
}

}  // namespace

ReferenceStatistics exact_stats_dp(const IsingModel& model, const std::vector<double>& beta_grid,
                                   const DpOptions& options) {
    return dp_stats_impl(model, {}, beta_grid, options);
}

ReferenceStatistics exact_stats_dp(const IsingModel& model, const std::vector<int>& order,
                                   const std::vector<double>& beta_grid,
                                   const DpOptions& options) {
    return dp_stats_impl(model, order, beta_grid, options);
}

SampleSet sample_exact_dp(const IsingModel& model, double beta, int n_samples,
                          std::uint64_t seed, int width_cap) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    DpSolver solver(model, {}, width_cap);
    return solver.sample(beta, n_samples, seed);
}

int dp_induced_width(const IsingModel& model) {
    int width = 0;
    choose_order(model, width);
    return width;
}

int dp_induced_width(const IsingModel& model, const std::vector<int>& order) {
    return simulate_width(adjacency_sets(model), order);
}

}  // namespace tempest
