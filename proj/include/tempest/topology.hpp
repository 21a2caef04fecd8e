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
#include <utility>
#include <vector>

#include "tempest/model.hpp"

namespace tempest {

// Chimera grid of K_{s,s} unit cells, with optional dead qubits/couplers
// (defects are modeled by deletion). Dead elements refer to ideal-graph
// node indices.
struct ChimeraSpec {
    int rows = 1;
    int cols = 1;
    int shore = 4;
    std::vector<int> dead_qubits;
    std::vector<std::pair<int, int>> dead_couplers;
};

struct NodeCoord {
    int row;
    int col;
    int shore;   // 0 = horizontal (couples across columns), 1 = vertical
    int offset;  // 0..shore_size-1
};

enum class EdgeKind : std::uint8_t { intra, inter };

// Node indexing is row-major over cells, then shore (horizontal first),
// then offset, so instance files are stable across builds. When qubits are
// deleted the remaining nodes are compacted in ascending ideal order;
// `ideal_index` maps back.
struct TopologyGraph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // i < j, sorted
    std::vector<EdgeKind> edge_kinds;
    std::vector<NodeCoord> coords;
    std::vector<int> ideal_index;
    std::vector<int> coloring;  // proper 2-coloring: (row + col + shore) mod 2
    ChimeraSpec spec;
};

int chimera_ideal_index(const ChimeraSpec& spec, int row, int col, int shore, int offset);

TopologyGraph build_chimera(const ChimeraSpec& spec);

// RAN1: couplings i.i.d. ±1, no fields.
IsingModel gen_ran1(const TopologyGraph& graph, std::uint64_t seed);

// AC3: intra-cell couplings i.i.d. ±1/3, inter-cell couplings -1, no fields.
// Inter-cell signs may instead be randomized ±1 (gauge-equivalent problem);
// off by default.
IsingModel gen_ac3(const TopologyGraph& graph, std::uint64_t seed,
                   bool randomize_intercell_sign = false);

}  // namespace tempest
