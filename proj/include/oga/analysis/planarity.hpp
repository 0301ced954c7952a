#pragma once

// Left-right planarity test (de Fraysseix-Rosenstiehl, in Brandes' formulation),
// testing phase only. Both depth-first passes run on explicit stacks.

#include <oga/graph.hpp>

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oga::analysis {

namespace planarity_detail {

inline constexpr std::size_t none = static_cast<std::size_t>(-1);

struct Interval {
    std::size_t low = none;
    std::size_t high = none;
    bool empty() const { return low == none && high == none; }
};

struct ConflictPair {
    Interval left, right;
    std::size_t id = none;
};

class LeftRight {
public:
    explicit LeftRight(const SimpleView& g) : g_(g) {}

    bool planar() {
        const std::size_t n = g_.node_count(), m = g_.edge_count();
        if (n > 2 && m > 3 * n - 6) return false;

        adj_.assign(n, {});
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t w : g_.neighbors(v)) {
                if (v > w) continue;
                adj_[v].push_back({w, src_.size()});
                adj_[w].push_back({v, src_.size()});
                src_.push_back(v);
                dst_.push_back(w);
            }
        }
        oriented_.assign(m, 0);
        lowpt_.assign(m, 0);
        lowpt2_.assign(m, 0);
        nesting_.assign(m, 0);
        ref_.assign(m, none);
        lowpt_edge_.assign(m, none);
        stack_bottom_.assign(m, none);
        height_.assign(n, none);
        parent_edge_.assign(n, none);
        out_.assign(n, {});

        std::vector<std::size_t> roots;
        for (std::size_t v = 0; v < n; ++v) {
            if (height_[v] != none) continue;
            height_[v] = 0;
            roots.push_back(v);
            orient(v);
        }
        for (auto& list : out_)
            std::stable_sort(list.begin(), list.end(),
                             [&](std::size_t a, std::size_t b) { return nesting_[a] < nesting_[b]; });
        for (std::size_t r : roots)
            if (!test(r)) return false;
        return true;
    }

private:
    struct Half {
        std::size_t to, edge;
    };

    void orient(std::size_t root) {
        std::vector<std::size_t> stack{root};
        std::vector<std::size_t> ind(adj_.size(), 0);
        std::vector<char> resumed(src_.size(), 0);
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            std::size_t e = parent_edge_[v];
            while (ind[v] < adj_[v].size()) {
                auto [w, vw] = adj_[v][ind[v]];
                bool resuming = resumed[vw] && src_[vw] == v;
                if (!resuming) {
                    if (oriented_[vw]) {
                        ++ind[v];
                        continue;
                    }
                    oriented_[vw] = 1;
                    src_[vw] = v;
                    dst_[vw] = w;
                    out_[v].push_back(vw);
                    lowpt_[vw] = lowpt2_[vw] = height_[v];
                    if (height_[w] == none) {
                        parent_edge_[w] = vw;
                        height_[w] = height_[v] + 1;
                        stack.push_back(v);
                        stack.push_back(w);
                        resumed[vw] = 1;
                        break;
                    }
                    lowpt_[vw] = height_[w];
                }
                nesting_[vw] = 2 * lowpt_[vw] + (lowpt2_[vw] < height_[v] ? 1 : 0);
                if (e != none) {
                    if (lowpt_[vw] < lowpt_[e]) {
                        lowpt2_[e] = std::min(lowpt_[e], lowpt2_[vw]);
                        lowpt_[e] = lowpt_[vw];
                    } else if (lowpt_[vw] > lowpt_[e]) {
                        lowpt2_[e] = std::min(lowpt2_[e], lowpt_[vw]);
                    } else {
                        lowpt2_[e] = std::min(lowpt2_[e], lowpt2_[vw]);
                    }
                }
                ++ind[v];
            }
        }
    }

    std::size_t top_id() const { return stack_.empty() ? none : stack_.back().id; }

    bool conflicting(const Interval& i, std::size_t b) const {
        return !i.empty() && lowpt_[i.high] > lowpt_[b];
    }

    std::size_t lowest(const ConflictPair& p) const {
        if (p.left.empty()) return lowpt_[p.right.low];
        if (p.right.empty()) return lowpt_[p.left.low];
        return std::min(lowpt_[p.left.low], lowpt_[p.right.low]);
    }

    void set_ref(std::size_t edge, std::size_t value) {
        if (edge != none) ref_[edge] = value;
    }

    bool test(std::size_t root) {
        std::vector<std::size_t> stack{root};
        std::vector<std::size_t> ind(adj_.size(), 0);
        std::vector<char> resumed(src_.size(), 0);
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            std::size_t e = parent_edge_[v];
            bool descended = false;
            while (ind[v] < out_[v].size()) {
                std::size_t ei = out_[v][ind[v]];
                if (!resumed[ei]) {
                    stack_bottom_[ei] = top_id();
                    if (ei == parent_edge_[dst_[ei]]) {
                        stack.push_back(v);
                        stack.push_back(dst_[ei]);
                        resumed[ei] = 1;
                        descended = true;
                        break;
                    }
                    lowpt_edge_[ei] = ei;
                    stack_.push_back({Interval{}, Interval{ei, ei}, next_id_++});
                }
                if (lowpt_[ei] < height_[v]) {
                    if (ei == out_[v].front()) lowpt_edge_[e] = lowpt_edge_[ei];
                    else if (!add_constraints(ei, e)) return false;
                }
                ++ind[v];
            }
            if (!descended && e != none) remove_back_edges(e);
        }
        return true;
    }

    bool add_constraints(std::size_t ei, std::size_t e) {
        ConflictPair p{{}, {}, next_id_++};
        do {
            ConflictPair q = stack_.back();
            stack_.pop_back();
            if (!q.left.empty()) std::swap(q.left, q.right);
            if (!q.left.empty()) return false;
            if (lowpt_[q.right.low] > lowpt_[e]) {
                if (p.right.empty()) p.right = q.right;
                else set_ref(p.right.low, q.right.high);
                p.right.low = q.right.low;
            } else {
                set_ref(q.right.low, lowpt_edge_[e]);
            }
        } while (top_id() != stack_bottom_[ei]);

        while (!stack_.empty() && (conflicting(stack_.back().left, ei) || conflicting(stack_.back().right, ei))) {
            ConflictPair q = stack_.back();
            stack_.pop_back();
            if (conflicting(q.right, ei)) std::swap(q.left, q.right);
            if (conflicting(q.right, ei)) return false;
            set_ref(p.right.low, q.right.high);
            if (q.right.low != none) p.right.low = q.right.low;
            if (p.left.empty()) p.left = q.left;
            else set_ref(p.left.low, q.left.high);
            p.left.low = q.left.low;
        }
        if (!(p.left.empty() && p.right.empty())) stack_.push_back(p);
        return true;
    }

    void remove_back_edges(std::size_t e) {
        std::size_t u = src_[e];
        while (!stack_.empty() && lowest(stack_.back()) == height_[u]) stack_.pop_back();
        if (!stack_.empty()) {
            ConflictPair p = stack_.back();
            stack_.pop_back();
            while (p.left.high != none && dst_[p.left.high] == u) p.left.high = ref_[p.left.high];
            if (p.left.high == none && p.left.low != none) {
                ref_[p.left.low] = p.right.low;
                p.left.low = none;
            }
            while (p.right.high != none && dst_[p.right.high] == u) p.right.high = ref_[p.right.high];
            if (p.right.high == none && p.right.low != none) {
                ref_[p.right.low] = p.left.high;
                p.right.low = none;
            }
            stack_.push_back(p);
        }
        if (lowpt_[e] < height_[u] && !stack_.empty()) {
            std::size_t hl = stack_.back().left.high, hr = stack_.back().right.high;
            ref_[e] = (hl != none && (hr == none || lowpt_[hl] > lowpt_[hr])) ? hl : hr;
        }
    }

    const SimpleView& g_;
    std::vector<std::vector<Half>> adj_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::size_t> src_, dst_;
    std::vector<char> oriented_;
    std::vector<std::size_t> lowpt_, lowpt2_, nesting_, ref_, lowpt_edge_, stack_bottom_;
    std::vector<std::size_t> height_, parent_edge_;
    std::vector<ConflictPair> stack_;
    std::size_t next_id_ = 0;
};

} // namespace planarity_detail

/// True iff the graph has a planar embedding. Loops, parallel edges and
/// directions are ignored.
inline bool is_planar(const SimpleView& g) { return planarity_detail::LeftRight(g).planar(); }

inline bool is_planar(const Graph& g) { return is_planar(SimpleView(g)); }

} // namespace oga::analysis
