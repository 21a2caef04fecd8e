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

#include "tempest/topology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "tempest/rng.hpp"

namespace tempest {

int chimera_ideal_index(const ChimeraSpec& spec, int row, int col, int shore, int offset) {
    return ((row * spec.cols + col) * 2 + shore) * spec.shore + offset;
}

TopologyGraph build_chimera(const ChimeraSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1 || spec.shore < 1)
        throw std::invalid_argument("chimera spec must have rows, cols, shore >= 1");

    const int n_ideal = spec.rows * spec.cols * 2 * spec.shore;

    std::set<int> dead_nodes;
    for (int q : spec.dead_qubits) {
        if (q < 0 || q >= n_ideal)
            throw std::invalid_argument("dead qubit " + std::to_string(q) +
                                        " outside ideal graph");
        dead_nodes.insert(q);
    }

    // ideal edges, tagged
    std::vector<std::pair<int, int>> ideal_edges;
    std::vector<EdgeKind> ideal_kinds;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            for (int a = 0; a < spec.shore; ++a) {
                int h = chimera_ideal_index(spec, r, c, 0, a);
                // K_{s,s} inside the cell
                for (int b = 0; b < spec.shore; ++b) {
                    int v = chimera_ideal_index(spec, r, c, 1, b);
                    ideal_edges.emplace_back(std::min(h, v), std::max(h, v));
                    ideal_kinds.push_back(EdgeKind::intra);
                }
                // horizontal shore couples to the next column's horizontal shore
                if (c + 1 < spec.cols) {
                    int h2 = chimera_ideal_index(spec, r, c + 1, 0, a);
                    ideal_edges.emplace_back(h, h2);
                    ideal_kinds.push_back(EdgeKind::inter);
                }
                // vertical shore couples to the next row's vertical shore
                if (r + 1 < spec.rows) {
                    int v1 = chimera_ideal_index(spec, r, c, 1, a);
                    int v2 = chimera_ideal_index(spec, r + 1, c, 1, a);
                    ideal_edges.emplace_back(v1, v2);
                    ideal_kinds.push_back(EdgeKind::inter);
                }
            }
        }
    }

    std::set<std::pair<int, int>> dead_edges;
    for (auto [a, b] : spec.dead_couplers) {
        auto key = std::minmax(a, b);
        bool found = false;
        for (const auto& e : ideal_edges)
            if (e.first == key.first && e.second == key.second) { found = true; break; }
        if (!found)
            throw std::invalid_argument("dead coupler (" + std::to_string(a) + "," +
                                        std::to_string(b) + ") outside ideal graph");
        dead_edges.insert({key.first, key.second});
    }

    // compact surviving nodes in ascending ideal order
    std::vector<int> compact(n_ideal, -1);
    TopologyGraph g;
    g.spec = spec;
    for (int q = 0; q < n_ideal; ++q) {
        if (dead_nodes.count(q)) continue;
        compact[q] = g.n_nodes++;
        int offset = q % spec.shore;
        int shore = (q / spec.shore) % 2;
        int cell = q / (2 * spec.shore);
        NodeCoord coord{cell / spec.cols, cell % spec.cols, shore, offset};
        g.coords.push_back(coord);
        g.ideal_index.push_back(q);
        g.coloring.push_back((coord.row + coord.col + coord.shore) % 2);
    }

    std::vector<std::size_t> order(ideal_edges.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ideal_edges[a] < ideal_edges[b];
    });
    for (std::size_t k : order) {
        auto [a, b] = ideal_edges[k];
        if (compact[a] < 0 || compact[b] < 0) continue;
        if (dead_edges.count({a, b})) continue;
        g.edges.emplace_back(compact[a], compact[b]);
        g.edge_kinds.push_back(ideal_kinds[k]);
    }
    return g;
}

namespace {

std::string instance_label(const char* cls, const TopologyGraph& graph, std::uint64_t seed) {
    std::string label = cls;
    label += "-c" + std::to_string(graph.spec.rows) + "x" + std::to_string(graph.spec.cols);
    if (graph.spec.shore != 4) label += "s" + std::to_string(graph.spec.shore);
    if (graph.n_nodes != graph.spec.rows * graph.spec.cols * 2 * graph.spec.shore ||
        !graph.spec.dead_couplers.empty())
        label += "d";  // carries defects
    label += "-seed" + std::to_string(seed);
    return label;
}

}  // namespace

IsingModel gen_ran1(const TopologyGraph& graph, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    std::vector<Edge> edges;
    edges.reserve(graph.edges.size());
    for (auto [i, j] : graph.edges)
        edges.push_back({i, j, static_cast<double>(rng.next_spin())});
    ModelMetadata meta{instance_label("ran1", graph, seed), "ran1", seed};
    return IsingModel(graph.n_nodes, std::move(edges), {}, std::move(meta));
}

IsingModel gen_ac3(const TopologyGraph& graph, std::uint64_t seed,
                   bool randomize_intercell_sign) {
    Xoshiro256pp rng(seed);
    std::vector<Edge> edges;
    edges.reserve(graph.edges.size());
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        auto [i, j] = graph.edges[k];
        double w;
        if (graph.edge_kinds[k] == EdgeKind::intra) {
            w = rng.next_spin() / 3.0;
        } else {
            w = randomize_intercell_sign ? static_cast<double>(rng.next_spin()) : -1.0;
        }
        edges.push_back({i, j, w});
    }
    ModelMetadata meta{instance_label("ac3", graph, seed), "ac3", seed};
    return IsingModel(graph.n_nodes, std::move(edges), {}, std::move(meta));
}

}  // namespace tempest
