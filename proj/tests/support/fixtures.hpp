#pragma once

// Test-only graph builders and random generators.

#include <oga/graph.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oga::testing {

inline std::vector<NodeRecord> plain_nodes(std::size_t n, const std::string& prefix = "") {
    std::vector<NodeRecord> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({prefix + std::to_string(i), {}, {}});
    return nodes;
}

inline Graph from_pairs(std::size_t n, const std::vector<std::pair<int, int>>& pairs, bool directed = false) {
    auto nodes = plain_nodes(n);
    std::vector<EdgeRecord> edges;
    for (auto [u, v] : pairs) edges.push_back({std::to_string(u), std::to_string(v), {}, {}, {}});
    return build_graph(directed, std::move(nodes), std::move(edges));
}

inline Graph complete(std::size_t n) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(int(i), int(j));
    return from_pairs(n, pairs);
}

inline Graph complete_bipartite(std::size_t a, std::size_t b) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) pairs.emplace_back(int(i), int(a + j));
    return from_pairs(a + b, pairs);
}

inline Graph cycle(std::size_t n, bool directed = false) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(int(i), int((i + 1) % n));
    return from_pairs(n, pairs, directed);
}

inline Graph path(std::size_t n, bool directed = false) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(int(i), int(i + 1));
    return from_pairs(n, pairs, directed);
}

/// Simple graph on n nodes whose edges are the set bits of `mask`, pairs
/// (i, j) with i < j taken in lexicographic order.
inline Graph graph_from_mask(std::size_t n, std::uint32_t mask) {
    std::vector<std::pair<int, int>> pairs;
    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++bit)
            if (mask >> bit & 1) pairs.emplace_back(int(i), int(j));
    return from_pairs(n, pairs);
}

/// G(n, p) on nodes "0".."n-1"; simple unless `multi` adds loops and parallel edges.
inline Graph random_graph(std::mt19937_64& rng, std::size_t n, double p, bool directed = false, bool multi = false) {
    std::vector<std::pair<int, int>> pairs;
    std::bernoulli_distribution coin(p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = directed ? 0 : i + 1; j < n; ++j)
            if (i != j && coin(rng)) pairs.emplace_back(int(i), int(j));
    if (multi && n > 0) {
        std::uniform_int_distribution<int> pick(0, int(n) - 1);
        for (int k = 0; k < 3; ++k) {
            int v = pick(rng);
            pairs.emplace_back(v, v);
        }
        if (!pairs.empty()) pairs.push_back(pairs.front());
    }
    return from_pairs(n, pairs, directed);
}

/// Same graph with node and edge lists shuffled.
inline Graph permuted(const Graph& g, std::mt19937_64& rng) {
    auto nodes = g.nodes();
    auto edges = g.edges();
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::shuffle(edges.begin(), edges.end(), rng);
    return build_graph(g.directed(), std::move(nodes), std::move(edges), g.graph_attrs());
}

} // namespace oga::testing
