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

#include "coopsched/conflict.hpp"

#include <algorithm>
#include <bit>

#include "coopsched/exact_lp.hpp"

namespace coopsched {

SimpleGraph::SimpleGraph(int n) : n_(n), words_((n + 63) / 64) {
    adj_.assign(n, std::vector<std::uint64_t>(words_, 0));
}

void SimpleGraph::addEdge(int u, int v) {
    if (u == v) throw std::invalid_argument("simple graph has no self loops");
    adj_[u][v >> 6] |= 1ull << (v & 63);
    adj_[v][u >> 6] |= 1ull << (u & 63);
}

bool SimpleGraph::hasEdge(int u, int v) const {
    return (adj_[u][v >> 6] >> (v & 63)) & 1ull;
}

int SimpleGraph::degree(int v) const {
    int d = 0;
    for (auto w : adj_[v]) d += std::popcount(w);
    return d;
}

long SimpleGraph::edgeCount() const {
    long total = 0;
    for (int v = 0; v < n_; ++v) total += degree(v);
    return total / 2;
}

std::vector<int> SimpleGraph::neighbors(int v) const {
    std::vector<int> out;
    for (int w = 0; w < words_; ++w) {
        std::uint64_t bits = adj_[v][w];
        while (bits) {
            const int b = std::countr_zero(bits);
            out.push_back(w * 64 + b);
            bits &= bits - 1;
        }
    }
    return out;
}

bool SimpleGraph::containsEdges(const SimpleGraph& other) const {
    if (other.n_ != n_) return false;
    for (int v = 0; v < n_; ++v)
        for (int w = 0; w < words_; ++w)
            if (other.adj_[v][w] & ~adj_[v][w]) return false;
    return true;
}

ConnectivityGraph build_connectivity(const RMatrix& pathloss, double threshold) {
    ConnectivityGraph g;
    g.numUsers = static_cast<int>(pathloss.rows());
    g.pathloss = pathloss;
    g.threshold = threshold;
    return g;
}

ConflictGraph build_conflict(const ConnectivityGraph& connectivity) {
    ConflictGraph cg;
    cg.pairs = PairIndexer(connectivity.numUsers);
    const int count = cg.pairs.count();
    cg.graph = SimpleGraph(count);
    for (int u = 0; u < count; ++u) {
        const auto [i, j] = cg.pairs.pair(u);
        for (int w = u + 1; w < count; ++w) {
            const auto [k, l] = cg.pairs.pair(w);
            if (connectivity.connected(i, l) || connectivity.connected(j, k))
                cg.graph.addEdge(u, w);
        }
    }
    return cg;
}

ChordalCompletion chordalize(const SimpleGraph& graph) {
    const int n = graph.size();
    ChordalCompletion out;
    out.graph = graph;
    out.eliminationOrder.reserve(n);

    SimpleGraph work = graph;
    std::vector<bool> alive(n, true);

    for (int step = 0; step < n; ++step) {
        // minimum degree among surviving vertices, smallest index on ties
        int best = -1, bestDeg = n + 1;
        for (int v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            int d = 0;
            for (int u : work.neighbors(v))
                if (alive[u]) ++d;
            if (d < bestDeg) {
                bestDeg = d;
                best = v;
            }
        }
        out.eliminationOrder.push_back(best);
        alive[best] = false;

        std::vector<int> nbrs;
        for (int u : work.neighbors(best))
            if (alive[u]) nbrs.push_back(u);
        for (std::size_t x = 0; x < nbrs.size(); ++x)
            for (std::size_t y = x + 1; y < nbrs.size(); ++y)
                if (!work.hasEdge(nbrs[x], nbrs[y])) {
                    work.addEdge(nbrs[x], nbrs[y]);
                    out.graph.addEdge(nbrs[x], nbrs[y]);
                    out.addedEdges.emplace_back(std::min(nbrs[x], nbrs[y]),
                                                std::max(nbrs[x], nbrs[y]));
                }
    }
    return out;
}

bool verify_chordal(const SimpleGraph& graph) {
    const int n = graph.size();
    if (n <= 1) return true;

    // Maximum cardinality search; the visit order reversed is a candidate PEO.
    std::vector<int> weight(n, 0), visitOrder;
    std::vector<bool> visited(n, false);
    visitOrder.reserve(n);
    for (int step = 0; step < n; ++step) {
        int best = -1;
        for (int v = 0; v < n; ++v)
            if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
        visited[best] = true;
        visitOrder.push_back(best);
        for (int u : graph.neighbors(best))
            if (!visited[u]) ++weight[u];
    }

    std::vector<int> position(n);  // position in the PEO
    for (int p = 0; p < n; ++p) position[visitOrder[n - 1 - p]] = p;

    // Tarjan-Yannakakis simpliciality test.
    for (int v = 0; v < n; ++v) {
        int parent = -1;
        for (int u : graph.neighbors(v))
            if (position[u] > position[v] && (parent < 0 || position[u] < position[parent]))
                parent = u;
        if (parent < 0) continue;
        for (int u : graph.neighbors(v)) {
            if (u == parent || position[u] <= position[v]) continue;
            if (!graph.hasEdge(parent, u)) return false;
        }
    }
    return true;
}

CliqueList maximal_cliques(const ChordalCompletion& completion) {
    if (!verify_chordal(completion.graph))
        throw std::invalid_argument("maximal_cliques requires a chordal graph");
    const int n = completion.graph.size();
    std::vector<int> position(n);
    for (int p = 0; p < n; ++p) position[completion.eliminationOrder[p]] = p;

    std::vector<std::vector<int>> candidates;
    candidates.reserve(n);
    for (int v = 0; v < n; ++v) {
        std::vector<int> clique{v};
        for (int u : completion.graph.neighbors(v))
            if (position[u] > position[v]) clique.push_back(u);
        std::sort(clique.begin(), clique.end());
        candidates.push_back(std::move(clique));
    }

    // Drop candidates contained in another candidate.
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    CliqueList out;
    for (const auto& c : candidates) {
        bool contained = false;
        for (const auto& kept : out.cliques) {
            if (kept.size() < c.size()) continue;
            if (std::includes(kept.begin(), kept.end(), c.begin(), c.end())) {
                contained = true;
                break;
            }
        }
        if (!contained) out.cliques.push_back(c);
    }
    return out;
}

namespace {

/// Bron-Kerbosch with pivoting on <= 64-vertex masks.
void bronKerbosch(std::uint64_t r, std::uint64_t p, std::uint64_t x,
                  const std::vector<std::uint64_t>& adj, std::vector<std::uint64_t>& out) {
    if (p == 0 && x == 0) {
        out.push_back(r);
        return;
    }
    const std::uint64_t px = p | x;
    int pivot = std::countr_zero(px);
    int bestCover = -1;
    for (std::uint64_t s = px; s;) {
        const int v = std::countr_zero(s);
        s &= s - 1;
        const int cover = std::popcount(p & adj[v]);
        if (cover > bestCover) {
            bestCover = cover;
            pivot = v;
        }
    }
    std::uint64_t ext = p & ~adj[pivot];
    while (ext) {
        const int v = std::countr_zero(ext);
        const std::uint64_t bit = 1ull << v;
        ext &= ext - 1;
        bronKerbosch(r | bit, p & adj[v], x & adj[v], adj, out);
        p &= ~bit;
        x |= bit;
    }
}

std::vector<std::uint64_t> adjacencyMasks(const SimpleGraph& graph, bool complement) {
    const int n = graph.size();
    if (n > 64) throw std::invalid_argument("brute-force graph routines capped at 64 vertices");
    std::vector<std::uint64_t> adj(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            const bool edge = graph.hasEdge(u, v);
            if (edge != complement) adj[u] |= 1ull << v;
        }
    return adj;
}

std::vector<std::vector<int>> maskListToVertexLists(const std::vector<std::uint64_t>& masks) {
    std::vector<std::vector<int>> out;
    out.reserve(masks.size());
    for (std::uint64_t m : masks) {
        std::vector<int> verts;
        while (m) {
            verts.push_back(std::countr_zero(m));
            m &= m - 1;
        }
        out.push_back(std::move(verts));
    }
    return out;
}

}  // namespace

CliqueList maximal_cliques_bruteforce(const SimpleGraph& graph) {
    const auto adj = adjacencyMasks(graph, false);
    std::vector<std::uint64_t> found;
    const std::uint64_t all = graph.size() == 64 ? ~0ull : (1ull << graph.size()) - 1;
    bronKerbosch(0, all, 0, adj, found);
    CliqueList out;
    out.cliques = maskListToVertexLists(found);
    std::sort(out.cliques.begin(), out.cliques.end());
    return out;
}

std::vector<std::vector<int>> maximal_independent_sets(const SimpleGraph& graph) {
    const auto adj = adjacencyMasks(graph, true);
    std::vector<std::uint64_t> found;
    const std::uint64_t all = graph.size() == 64 ? ~0ull : (1ull << graph.size()) - 1;
    bronKerbosch(0, all, 0, adj, found);
    auto out = maskListToVertexLists(found);
    std::sort(out.begin(), out.end());
    return out;
}

Rational clique_load(const LoadVector& load, const std::vector<int>& clique) {
    Rational total(0);
    for (int v : clique) {
        if (load.availability[v] <= 0)
            throw std::invalid_argument("availability must be positive");
        total += load.beta[v] / load.availability[v];
    }
    return total;
}

bool inner_bound_member(const LoadVector& load, const CliqueList& cliques) {
    for (const auto& q : cliques.cliques)
        if (clique_load(load, q) > 1) return false;
    return true;
}

bool stability_member_bruteforce(const LoadVector& load, const SimpleGraph& conflictGraph) {
    const int n = conflictGraph.size();
    if (n > 12) throw std::invalid_argument("brute-force stability check capped at 12 vertices");

    std::vector<Rational> target(n);
    for (int v = 0; v < n; ++v) {
        if (load.beta[v] < 0) return false;
        target[v] = load.beta[v] / load.availability[v];
        if (target[v] > 1) return false;
    }

    // x in conv(independent sets) iff x is dominated by a convex combination
    // of maximal independent-set incidence vectors (the polytope is
    // down-monotone, so slack below a hull point stays inside).
    const auto sets = maximal_independent_sets(conflictGraph);
    const int k = static_cast<int>(sets.size());

    std::vector<LpConstraint> constraints;
    LpConstraint sumOne;
    sumOne.coeffs.assign(k, Rational(1));
    sumOne.relation = LpRelation::Equal;
    sumOne.rhs = 1;
    constraints.push_back(std::move(sumOne));
    for (int v = 0; v < n; ++v) {
        LpConstraint dom;
        dom.coeffs.assign(k, Rational(0));
        for (int m = 0; m < k; ++m)
            if (std::binary_search(sets[m].begin(), sets[m].end(), v)) dom.coeffs[m] = 1;
        dom.relation = LpRelation::GreaterEqual;
        dom.rhs = target[v];
        constraints.push_back(std::move(dom));
    }
    return lp_feasible(constraints, k);
}

}  // namespace coopsched
