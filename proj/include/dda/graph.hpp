#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dda/rng.hpp"

namespace dda {

enum class GraphKind { complete, regular_expander, ring };

inline const char* to_string(GraphKind k) {
    switch (k) {
        case GraphKind::complete: return "complete";
        case GraphKind::regular_expander: return "regular-expander";
        case GraphKind::ring: return "ring";
    }
    return "?";
}

// Undirected simple graph stored as sorted neighbor lists.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adjacency;
    GraphKind kind = GraphKind::complete;

    int degree(int i) const { return static_cast<int>(adjacency.at(i).size()); }

    std::size_t edge_count() const {
        std::size_t twice = 0;
        for (const auto& nbrs : adjacency) twice += nbrs.size();
        return twice / 2;
    }

    bool has_edge(int i, int j) const {
        const auto& nbrs = adjacency.at(i);
        return std::binary_search(nbrs.begin(), nbrs.end(), j);
    }
};

inline bool is_connected(const Graph& g) {
    if (g.n == 0) return false;
    std::vector<char> seen(g.n, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : g.adjacency[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == g.n;
}

// Checks the structural invariants every toolkit graph must satisfy:
// undirected, no self-loops or duplicate edges, connected, and equal
// degrees for the regular kinds. Throws std::invalid_argument on violation.
inline void validate_graph(const Graph& g) {
    if (g.n < 1) throw std::invalid_argument("graph: node count must be positive");
    if (static_cast<int>(g.adjacency.size()) != g.n)
        throw std::invalid_argument("graph: adjacency size mismatch");
    for (int i = 0; i < g.n; ++i) {
        const auto& nbrs = g.adjacency[i];
        if (!std::is_sorted(nbrs.begin(), nbrs.end()))
            throw std::invalid_argument("graph: neighbor lists must be sorted");
        if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
            throw std::invalid_argument("graph: duplicate edge");
        for (int j : nbrs) {
            if (j < 0 || j >= g.n) throw std::invalid_argument("graph: neighbor out of range");
            if (j == i) throw std::invalid_argument("graph: self-loop");
            if (!g.has_edge(j, i)) throw std::invalid_argument("graph: asymmetric adjacency");
        }
    }
    if (!is_connected(g)) throw std::invalid_argument("graph: not connected");
    if (g.kind == GraphKind::regular_expander || g.kind == GraphKind::ring) {
        for (int i = 1; i < g.n; ++i)
            if (g.degree(i) != g.degree(0))
                throw std::invalid_argument("graph: regular kind with unequal degrees");
    }
}

inline Graph complete_graph(int n) {
    if (n < 1) throw std::invalid_argument("complete_graph: n must be positive");
    Graph g;
    g.n = n;
    g.kind = GraphKind::complete;
    g.adjacency.assign(n, {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) g.adjacency[i].push_back(j);
    return g;
}

inline Graph ring_graph(int n) {
    if (n < 1) throw std::invalid_argument("ring_graph: n must be positive");
    Graph g;
    g.n = n;
    g.kind = GraphKind::ring;
    g.adjacency.assign(n, {});
    for (int i = 0; i < n; ++i) {
        std::set<int> nbrs;
        nbrs.insert((i + 1) % n);
        nbrs.insert((i + n - 1) % n);
        nbrs.erase(i);  // n <= 2 folds a neighbor onto itself
        g.adjacency[i].assign(nbrs.begin(), nbrs.end());
    }
    return g;
}

// Random k-regular graph via the configuration model: pair up n*k stubs,
// reject pairings with self-loops or multi-edges, then require
// connectivity. Deterministic for a fixed seed.
inline Graph random_regular_graph(int n, int k, std::uint64_t seed, int max_attempts = 100) {
    if (n < 1) throw std::invalid_argument("random_regular_graph: n must be positive");
    if (k < 1 || k >= n)
        throw std::invalid_argument("random_regular_graph: need 1 <= k < n");
    if ((static_cast<long long>(n) * k) % 2 != 0)
        throw std::invalid_argument("random_regular_graph: n*k must be even");

    Rng rng(mix_seed(seed, 0xc0f19));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * k);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < k; ++c) stubs.push_back(i);
        rng.shuffle(stubs);

        Graph g;
        g.n = n;
        g.kind = GraphKind::regular_expander;
        g.adjacency.assign(n, {});
        bool simple = true;
        std::set<std::pair<int, int>> edges;
        for (std::size_t s = 0; s + 1 < stubs.size(); s += 2) {
            int a = stubs[s], b = stubs[s + 1];
            if (a == b) { simple = false; break; }
            auto e = std::minmax(a, b);
            if (!edges.insert({e.first, e.second}).second) { simple = false; break; }
        }
        if (!simple) continue;
        for (const auto& [a, b] : edges) {
            g.adjacency[a].push_back(b);
            g.adjacency[b].push_back(a);
        }
        for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
        if (!is_connected(g)) continue;
        return g;
    }
    throw std::runtime_error("random_regular_graph: no simple connected graph found within " +
                             std::to_string(max_attempts) + " attempts (n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ")");
}

}  // namespace dda
