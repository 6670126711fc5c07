// SPDX-License-Identifier: Apache-2.0
//
// coopsched - D2D-cooperative cellular downlink scheduling simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef COOPSCHED_CONFLICT_HPP
#define COOPSCHED_CONFLICT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "coopsched/rational.hpp"
#include "coopsched/types.hpp"

namespace coopsched {

/// Simple undirected graph over 0..n-1 with bitset adjacency rows.
class SimpleGraph {
  public:
    SimpleGraph() = default;
    explicit SimpleGraph(int n);

    int size() const { return n_; }
    void addEdge(int u, int v);
    bool hasEdge(int u, int v) const;
    int degree(int v) const;
    long edgeCount() const;
    std::vector<int> neighbors(int v) const;
    const std::vector<std::uint64_t>& row(int v) const { return adj_[v]; }

    /// True if every edge of `other` is present here (same vertex count).
    bool containsEdges(const SimpleGraph& other) const;

  private:
    int n_ = 0;
    int words_ = 0;
    std::vector<std::vector<std::uint64_t>> adj_;
};

/// User-level connectivity: edge iff i == j or phi_ij > theta. Self loops are
/// implicit (connected(i, i) always true).
struct ConnectivityGraph {
    int numUsers = 0;
    RMatrix pathloss;
    double threshold = 0.0;

    bool connected(int i, int j) const {
        return i == j || pathloss(i, j) > threshold;
    }
};

ConnectivityGraph build_connectivity(const RMatrix& pathloss, double threshold);

/// Conflict graph over ordered relay pairs (i, j), i != j: two distinct pairs
/// (i, j), (k, l) conflict iff (i, l) or (j, k) is a connectivity edge.
struct ConflictGraph {
    PairIndexer pairs;
    SimpleGraph graph;
};

ConflictGraph build_conflict(const ConnectivityGraph& connectivity);

struct ChordalCompletion {
    SimpleGraph graph;  ///< base edges plus fill-in
    std::vector<std::pair<int, int>> addedEdges;
    std::vector<int> eliminationOrder;
};

/// Elimination-game fill-in along a minimum-degree ordering. The output is
/// chordal and contains every input edge.
ChordalCompletion chordalize(const SimpleGraph& graph);

/// Maximum-cardinality search + simpliciality check for a perfect
/// elimination ordering.
bool verify_chordal(const SimpleGraph& graph);

struct CliqueList {
    std::vector<std::vector<int>> cliques;  ///< maximal, sorted vertex lists
};

/// Maximal cliques of a chordal graph: vertex + later neighbors along the
/// elimination order, filtered for maximality. Rejects non-chordal input.
CliqueList maximal_cliques(const ChordalCompletion& completion);

/// Brute-force maximal clique enumeration (test oracle, small graphs only).
CliqueList maximal_cliques_bruteforce(const SimpleGraph& graph);

/// Per-vertex load beta and availability p on the conflict graph.
struct LoadVector {
    std::vector<Rational> beta;
    std::vector<Rational> availability;
};

/// beta_Q = sum over the clique of beta_ij / p_ij.
Rational clique_load(const LoadVector& load, const std::vector<int>& clique);

/// Inner-bound membership: beta_Q <= 1 for every maximal clique of the
/// chordal completion (boundary included).
bool inner_bound_member(const LoadVector& load, const CliqueList& cliques);

/// Exact stability membership D^-1 beta in conv(independent-set incidence
/// vectors), solved as a rational LP feasibility problem. Exponential in the
/// vertex count; rejects graphs larger than 12 vertices.
bool stability_member_bruteforce(const LoadVector& load, const SimpleGraph& conflictGraph);

/// All maximal independent sets (complement-graph Bron-Kerbosch),
/// as sorted vertex lists.
std::vector<std::vector<int>> maximal_independent_sets(const SimpleGraph& graph);

}  // namespace coopsched

#endif
