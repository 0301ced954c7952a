#pragma once

#include <oga/analysis/components.hpp>
#include <oga/error.hpp>
#include <oga/graph.hpp>

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <tuple>
#include <vector>

namespace oga::analysis {

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

class TimeBudgetExceeded : public Error {
public:
    TimeBudgetExceeded() : Error("TimeBudgetExceeded", "analysis time budget exceeded") {}
};

inline void check_deadline(const Deadline& d) {
    if (d && std::chrono::steady_clock::now() > *d) throw TimeBudgetExceeded();
}

namespace connectivity_detail {

/// Unit-capacity flow network of the vertex-split graph: vertex v becomes
/// v_in = 2v and v_out = 2v + 1 joined by one arc of capacity 1; every
/// undirected edge {u, w} becomes arcs u_out -> w_in and w_out -> u_in.
class SplitNetwork {
public:
    explicit SplitNetwork(const SimpleView& g) : head_(2 * g.node_count(), none) {
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            add_arc(2 * v, 2 * v + 1);
            for (std::size_t w : g.neighbors(v)) add_arc(2 * v + 1, 2 * w);
        }
    }

    /// Number of internally vertex-disjoint s-t paths, counted up to `cap`.
    std::size_t local_connectivity(std::size_t s, std::size_t t, std::size_t cap, const Deadline& deadline) {
        std::fill(flow_.begin(), flow_.end(), 0);
        std::size_t source = 2 * s + 1, sink = 2 * t;
        std::size_t found = 0;
        std::vector<std::size_t> via(head_.size());
        std::vector<std::size_t> queue;
        while (found < cap) {
            check_deadline(deadline);
            std::fill(via.begin(), via.end(), none);
            via[source] = none - 1;
            queue.assign(1, source);
            for (std::size_t qi = 0; qi < queue.size() && via[sink] == none; ++qi) {
                std::size_t x = queue[qi];
                for (std::size_t a = head_[x]; a != none; a = next_[a]) {
                    std::size_t y = to_[a];
                    if (via[y] != none || residual(a) == 0) continue;
                    via[y] = a;
                    queue.push_back(y);
                }
            }
            if (via[sink] == none) break;
            for (std::size_t y = sink; y != source;) {
                std::size_t a = via[y];
                ++flow_[a];
                --flow_[a ^ 1];
                y = to_[a ^ 1];
            }
            ++found;
        }
        return found;
    }

private:
    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    void add_arc(std::size_t from, std::size_t to) {
        for (auto [x, y, c] : {std::tuple{from, to, 1}, std::tuple{to, from, 0}}) {
            to_.push_back(y);
            cap_.push_back(c);
            flow_.push_back(0);
            next_.push_back(head_[x]);
            head_[x] = to_.size() - 1;
        }
    }

    int residual(std::size_t a) const { return cap_[a] - flow_[a]; }

    std::vector<std::size_t> head_, next_, to_;
    std::vector<int> cap_, flow_;
};

} // namespace connectivity_detail

/// Vertex connectivity of the simple undirected view. Kn gives n - 1; graphs
/// with fewer than two nodes and disconnected graphs give 0.
inline std::size_t vertex_connectivity(const SimpleView& g, const Deadline& deadline = {}) {
    const std::size_t n = g.node_count();
    if (n <= 1) return 0;
    std::size_t min_degree = n;
    for (std::size_t v = 0; v < n; ++v) min_degree = std::min(min_degree, g.degree(v));
    if (g.edge_count() == n * (n - 1) / 2) return n - 1;

    // Connectivity and cut vertices settle the cheap cases.
    std::vector<std::size_t> seen(n, 0), stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : g.neighbors(v))
            if (!seen[w]) seen[w] = 1, ++reached, stack.push_back(w);
    }
    if (reached < n) return 0;
    if (min_degree <= 1) return 1;
    if (!biconnected_components(g).articulation_points.empty()) return 1;

    // Some vertex among v_0..v_k lies outside any minimum separator of size k;
    // pairing it with every later non-neighbour finds the separator.
    connectivity_detail::SplitNetwork net(g);
    std::size_t best = min_degree;
    for (std::size_t i = 0; i <= best && i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (g.adjacent(i, j)) continue;
            best = std::min(best, net.local_connectivity(i, j, best, deadline));
            if (best == 2) return best;
        }
    }
    return best;
}

inline std::size_t vertex_connectivity(const Graph& g, const Deadline& deadline = {}) {
    return vertex_connectivity(SimpleView(g), deadline);
}

} // namespace oga::analysis
