#pragma once

#include <oga/graph.hpp>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oga::analysis {

/// Weakly connected components as lists of node ids, each in node order;
/// components are ordered by their first node.
inline std::vector<std::vector<std::string>> connected_components(const Graph& g) {
    std::vector<std::size_t> parent(g.node_count());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& arc : g.arcs()) {
        auto a = find(arc.source), b = find(arc.target);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::vector<std::string>> out;
    std::vector<std::size_t> slot(g.node_count(), static_cast<std::size_t>(-1));
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        auto r = find(v);
        if (slot[r] == static_cast<std::size_t>(-1)) {
            slot[r] = out.size();
            out.emplace_back();
        }
        out[slot[r]].push_back(g.nodes()[v].id);
    }
    return out;
}

using IndexEdge = std::pair<std::size_t, std::size_t>;

struct Biconnected {
    /// Edges of the simple undirected view, smaller index first.
    std::vector<std::vector<IndexEdge>> components;
    std::vector<std::size_t> articulation_points;
};

/// Hopcroft-Tarjan over the simple undirected view, without recursion.
inline Biconnected biconnected_components(const SimpleView& g) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    const std::size_t n = g.node_count();
    std::vector<std::size_t> disc(n, unset), low(n, 0);
    std::vector<char> is_cut(n, 0);
    std::vector<IndexEdge> edge_stack;
    Biconnected out;

    struct Frame {
        std::size_t v, parent, next;
    };
    std::vector<Frame> frames;
    std::size_t clock = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (disc[root] != unset) continue;
        disc[root] = low[root] = clock++;
        frames.push_back({root, unset, 0});
        std::size_t root_children = 0;
        while (!frames.empty()) {
            Frame& f = frames.back();
            std::size_t v = f.v;
            const auto& nb = g.neighbors(v);
            if (f.next < nb.size()) {
                std::size_t w = nb[f.next++];
                if (w == f.parent) continue;
                if (disc[w] == unset) {
                    edge_stack.emplace_back(v, w);
                    disc[w] = low[w] = clock++;
                    frames.push_back({w, v, 0});
                } else if (disc[w] < disc[v]) {
                    edge_stack.emplace_back(v, w);
                    low[v] = std::min(low[v], disc[w]);
                }
                continue;
            }
            frames.pop_back();
            if (frames.empty()) break;
            std::size_t p = frames.back().v;
            low[p] = std::min(low[p], low[v]);
            if (low[v] >= disc[p]) {
                if (p == root) ++root_children;
                else is_cut[p] = 1;
                auto& comp = out.components.emplace_back();
                for (;;) {
                    auto e = edge_stack.back();
                    edge_stack.pop_back();
                    comp.emplace_back(std::min(e.first, e.second), std::max(e.first, e.second));
                    if (e.first == p && e.second == v) break;
                }
            }
        }
        if (root_children > 1) is_cut[root] = 1;
    }
    for (std::size_t v = 0; v < n; ++v)
        if (is_cut[v]) out.articulation_points.push_back(v);
    return out;
}

inline Biconnected biconnected_components(const Graph& g) { return biconnected_components(SimpleView(g)); }

/// 2-coloring of the undirected multigraph; a self-loop makes it non-bipartite.
inline bool is_bipartite(const Graph& g) {
    std::vector<std::vector<std::size_t>> adj(g.node_count());
    for (const auto& arc : g.arcs()) {
        if (arc.source == arc.target) return false;
        adj[arc.source].push_back(arc.target);
        adj[arc.target].push_back(arc.source);
    }
    std::vector<int> color(g.node_count(), -1);
    std::vector<std::size_t> queue;
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        if (color[s] >= 0) continue;
        color[s] = 0;
        queue.assign(1, s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::size_t v = queue[head];
            for (std::size_t w : adj[v]) {
                if (color[w] < 0) {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if (color[w] == color[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Directed: no directed cycle (self-loops count). Undirected: the multigraph
/// is a forest, so loops and parallel edges are cycles.
inline bool is_acyclic(const Graph& g) {
    const std::size_t n = g.node_count();
    if (!g.directed()) {
        for (const auto& arc : g.arcs())
            if (arc.source == arc.target) return false;
        return g.edge_count() + connected_components(g).size() == n;
    }
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::vector<std::size_t>> out(n);
    for (const auto& arc : g.arcs()) {
        out[arc.source].push_back(arc.target);
        ++indeg[arc.target];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t removed = 0;
    while (!ready.empty()) {
        std::size_t v = ready.back();
        ready.pop_back();
        ++removed;
        for (std::size_t w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    return removed == n;
}

} // namespace oga::analysis
