#pragma once

#include <oga/analysis/components.hpp>
#include <oga/error.hpp>
#include <oga/graph.hpp>
#include <oga/random.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace oga::generators {

class FilterExhausted : public Error {
public:
    explicit FilterExhausted(const std::string& message) : Error("FilterExhausted", message) {}
};

/// Structural stand-in for judging whether a mutated graph still resembles its seed.
struct SuitabilityFilter {
    bool require_connected = true;
    double density_low = 0.0;
    double density_high = 1.0;
    /// L1 distance between the candidate's and the seed's degree histograms,
    /// each normalized to sum 1; 2 accepts everything.
    double max_degree_seq_distance = 2.0;
};

enum class MutationOp : std::size_t { insert_vertex, remove_vertex, insert_edge, remove_edge, subdivide_edge };

inline constexpr std::array<const char*, 5> mutation_op_names{"insert-vertex", "remove-vertex", "insert-edge",
                                                              "remove-edge", "subdivide-edge"};

struct MutationConfig {
    std::size_t rounds = 10;
    std::size_t ops_per_round = 5;
    std::array<double, 5> op_probabilities{0.2, 0.2, 0.2, 0.2, 0.2};
    /// Each round every probability moves by a uniform draw from [-epsilon, epsilon].
    double epsilon = 0.05;
    std::size_t min_n = 10;
    std::size_t max_n = 100;
    std::uint64_t rng_seed = 0;
    SuitabilityFilter filter;
    /// Candidates tried per round before giving up.
    std::size_t max_attempts = 1000;
};

inline void validate(const MutationConfig& cfg) {
    double sum = 0;
    for (double p : cfg.op_probabilities) {
        if (!(p >= 0)) throw InvalidConfig("operation probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidConfig("operation probabilities must sum to 1");
    if (cfg.min_n < 1) throw InvalidConfig("min_n must be at least 1");
    if (cfg.min_n > cfg.max_n) throw InvalidConfig("min_n must not exceed max_n");
    if (cfg.filter.density_low > cfg.filter.density_high) throw InvalidConfig("density bounds are reversed");
    if (!(cfg.epsilon >= 0)) throw InvalidConfig("epsilon must be non-negative");
    if (cfg.max_attempts == 0) throw InvalidConfig("max_attempts must be positive");
}

inline double simple_density(const SimpleView& v) {
    std::size_t n = v.node_count();
    return n < 2 ? 0.0 : 2.0 * static_cast<double>(v.edge_count()) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline std::vector<double> degree_histogram(const SimpleView& v) {
    std::vector<double> h;
    for (std::size_t i = 0; i < v.node_count(); ++i) {
        if (v.degree(i) >= h.size()) h.resize(v.degree(i) + 1, 0.0);
        h[v.degree(i)] += 1.0;
    }
    for (double& x : h) x /= static_cast<double>(v.node_count());
    return h;
}

inline double histogram_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
        d += std::abs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0));
    return d;
}

inline bool passes(const SuitabilityFilter& f, const Graph& candidate, const Graph& seed) {
    SimpleView c(candidate), s(seed);
    if (f.require_connected && analysis::connected_components(candidate).size() != 1) return false;
    double density = simple_density(c);
    if (density < f.density_low || density > f.density_high) return false;
    return histogram_distance(degree_histogram(c), degree_histogram(s)) <= f.max_degree_seq_distance;
}

namespace rome_detail {

/// Mutable simple undirected graph used while applying operations. Edges keep
/// their records (order, orientation, attributes) so untouched parts of the
/// seed come out unchanged.
struct Work {
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    std::size_t next_fresh = 0;
    std::unordered_set<std::string> ids;

    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) { return std::minmax(a, b); }

    std::set<std::pair<std::string, std::string>> edge_keys() const {
        std::set<std::pair<std::string, std::string>> out;
        for (const auto& e : edges) out.insert(key(e.source, e.target));
        return out;
    }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return i;
        return nodes.size();
    }

    const std::string& add_node() {
        std::string id;
        do id = "v" + std::to_string(next_fresh++);
        while (ids.count(id));
        ids.insert(id);
        nodes.push_back({id, {}, {}});
        return nodes.back().id;
    }

    void add_edge(const std::string& a, const std::string& b) { edges.push_back({a, b, {}, {}, {}}); }

    std::vector<std::string> neighbors(const std::string& v) const {
        std::vector<std::string> out;
        for (const auto& e : edges) {
            if (e.source == v) out.push_back(e.target);
            else if (e.target == v) out.push_back(e.source);
        }
        return out;
    }

    void remove_node(const std::string& v) {
        ids.erase(v);
        nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(index_of(v)));
        std::erase_if(edges, [&](const EdgeRecord& e) { return e.source == v || e.target == v; });
    }

    Graph build() const { return build_graph(false, nodes, edges); }

    /// Positions in `edges` of the edges whose removal keeps their component connected.
    std::vector<std::size_t> non_bridges() const {
        Graph g = build();
        std::set<std::pair<std::string, std::string>> bridges;
        for (const auto& component : analysis::biconnected_components(g).components)
            if (component.size() == 1)
                bridges.insert(key(g.nodes()[component[0].first].id, g.nodes()[component[0].second].id));
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < edges.size(); ++k)
            if (!bridges.count(key(edges[k].source, edges[k].target))) out.push_back(k);
        return out;
    }
};

/// Applies one operation; operations that cannot apply (or would leave the
/// size bounds) do nothing.
inline void apply(Work& w, MutationOp op, Rng& rng, std::size_t min_n, std::size_t max_n) {
    const std::size_t n = w.nodes.size();
    switch (op) {
    case MutationOp::insert_vertex: {
        if (n + 1 > max_n) return;
        std::string anchor = n > 0 ? w.nodes[rng.below(n)].id : std::string();
        std::string v = w.add_node();
        if (n > 0) w.add_edge(anchor, v);
        return;
    }
    case MutationOp::remove_vertex: {
        if (n <= min_n) return;
        std::vector<std::string> candidates;
        for (const auto& node : w.nodes)
            if (w.neighbors(node.id).size() <= 2) candidates.push_back(node.id);
        if (candidates.empty()) return;
        std::string v = candidates[rng.below(candidates.size())];
        auto nb = w.neighbors(v);
        w.remove_node(v);
        if (nb.size() == 2 && !w.edge_keys().count(Work::key(nb[0], nb[1]))) w.add_edge(nb[0], nb[1]);
        return;
    }
    case MutationOp::insert_edge: {
        auto present = w.edge_keys();
        std::vector<std::pair<std::size_t, std::size_t>> missing;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (!present.count(Work::key(w.nodes[a].id, w.nodes[b].id))) missing.emplace_back(a, b);
        if (missing.empty()) return;
        auto [a, b] = missing[rng.below(missing.size())];
        w.add_edge(w.nodes[a].id, w.nodes[b].id);
        return;
    }
    case MutationOp::remove_edge: {
        auto candidates = w.non_bridges();
        if (candidates.empty()) return;
        w.edges.erase(w.edges.begin() + static_cast<std::ptrdiff_t>(candidates[rng.below(candidates.size())]));
        return;
    }
    case MutationOp::subdivide_edge: {
        if (n + 1 > max_n || w.edges.empty()) return;
        std::size_t k = rng.below(w.edges.size());
        EdgeRecord e = w.edges[k];
        w.edges.erase(w.edges.begin() + static_cast<std::ptrdiff_t>(k));
        std::string v = w.add_node();
        w.add_edge(e.source, v);
        w.add_edge(v, e.target);
        return;
    }
    }
}

inline void perturb(std::array<double, 5>& p, double epsilon, Rng& rng) {
    double sum = 0;
    for (double& x : p) {
        x = std::max(0.0, x + rng.uniform(-epsilon, epsilon));
        sum += x;
    }
    for (double& x : p) x = sum > 0 ? x / sum : 1.0 / static_cast<double>(p.size());
}

} // namespace rome_detail

/// One trace entry per round: the probabilities used for that round.
struct MutationTrace {
    std::vector<std::array<double, 5>> probabilities;
    std::vector<std::size_t> attempts;
};

/// Rome-style generator. Each round mutates the previously accepted graph by
/// `ops_per_round` random operations and retries until the candidate passes the
/// filter; returns one graph per round.
inline std::vector<Graph> mutate_rome(const Graph& seed_graph, const MutationConfig& cfg, MutationTrace* trace = nullptr) {
    validate(cfg);
    if (seed_graph.directed()) throw InvalidGraph("the seed graph must be undirected");
    if (analysis::connected_components(seed_graph).size() != 1) throw InvalidGraph("the seed graph must be connected");
    if (seed_graph.node_count() < cfg.min_n || seed_graph.node_count() > cfg.max_n)
        throw InvalidConfig("the seed graph's node count lies outside the size bounds");

    Rng rng(cfg.rng_seed);
    rome_detail::Work current;
    current.nodes = seed_graph.nodes();
    for (const auto& n : current.nodes) current.ids.insert(n.id);
    // Loops and parallel edges are dropped; the first copy of an edge is kept.
    std::set<std::pair<std::string, std::string>> kept;
    for (const auto& e : seed_graph.edges())
        if (e.source != e.target && kept.insert(rome_detail::Work::key(e.source, e.target)).second)
            current.edges.push_back(e);

    std::vector<double> probs;
    std::array<double, 5> p = cfg.op_probabilities;
    std::vector<Graph> out;
    for (std::size_t round = 0; round < cfg.rounds; ++round) {
        if (trace) trace->probabilities.push_back(p);
        probs.assign(p.begin(), p.end());
        bool accepted = false;
        for (std::size_t attempt = 1; attempt <= cfg.max_attempts && !accepted; ++attempt) {
            rome_detail::Work candidate = current;
            for (std::size_t k = 0; k < cfg.ops_per_round; ++k)
                rome_detail::apply(candidate, static_cast<MutationOp>(rng.pick(probs)), rng, cfg.min_n, cfg.max_n);
            Graph g = candidate.build();
            if (g.node_count() < cfg.min_n || g.node_count() > cfg.max_n) continue;
            if (!passes(cfg.filter, g, seed_graph)) continue;
            out.push_back(std::move(g));
            current = std::move(candidate);
            accepted = true;
            if (trace) trace->attempts.push_back(attempt);
        }
        if (!accepted)
            throw FilterExhausted("no candidate passed the filter in round " + std::to_string(round + 1) + " after " +
                                  std::to_string(cfg.max_attempts) + " attempts");
        rome_detail::perturb(p, cfg.epsilon, rng);
    }
    return out;
}

/// Keeps the first graph of every labeled-isomorphism class.
inline std::vector<Graph> dedup_labeled(const std::vector<Graph>& graphs) {
    std::unordered_set<std::string> seen;
    std::vector<Graph> out;
    for (const auto& g : graphs)
        if (seen.insert(labeled_signature(g)).second) out.push_back(g);
    return out;
}

struct Augmented {
    Graph graph;
    std::vector<EdgeRecord> added;
};

/// Joins the weak components with one edge each: components are taken in a
/// random order and each is attached to a random earlier one, with uniformly
/// chosen endpoints (and a random direction for directed graphs).
inline Augmented connect_randomly(const Graph& g, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    auto components = analysis::connected_components(g);
    rng.shuffle(components);
    std::vector<EdgeRecord> edges = g.edges();
    std::vector<EdgeRecord> added;
    for (std::size_t i = 1; i < components.size(); ++i) {
        const auto& here = components[i];
        const auto& there = components[rng.below(i)];
        std::string a = here[rng.below(here.size())];
        std::string b = there[rng.below(there.size())];
        if (g.directed() && rng.coin()) std::swap(a, b);
        added.push_back({a, b, {}, {}, {}});
    }
    edges.insert(edges.end(), added.begin(), added.end());
    return {build_graph(g.directed(), g.nodes(), std::move(edges), g.graph_attrs()), std::move(added)};
}

/// Vertex order from the Eades-Lin-Smyth greedy heuristic: sinks go to the
/// back, sources to the front, otherwise the vertex maximizing
/// outdegree - indegree (lowest index on ties). Self-loops are ignored.
inline std::vector<std::size_t> els_order(const Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::size_t>> out(n), in(n);
    std::vector<long long> indeg(n, 0), outdeg(n, 0);
    for (const auto& arc : g.arcs()) {
        if (arc.source == arc.target) continue;
        out[arc.source].push_back(arc.target);
        in[arc.target].push_back(arc.source);
        ++outdeg[arc.source];
        ++indeg[arc.target];
    }
    std::vector<char> gone(n, 0);
    std::vector<std::size_t> front, back;
    std::size_t left = n;
    auto remove = [&](std::size_t v) {
        gone[v] = 1;
        --left;
        for (auto w : out[v]) --indeg[w];
        for (auto w : in[v]) --outdeg[w];
    };
    while (left > 0) {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t v = 0; v < n; ++v) {
                if (gone[v]) continue;
                if (outdeg[v] == 0) {
                    back.push_back(v);
                    remove(v);
                    progress = true;
                } else if (indeg[v] == 0) {
                    front.push_back(v);
                    remove(v);
                    progress = true;
                }
            }
        }
        if (left == 0) break;
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!gone[v] && (best == n || outdeg[v] - indeg[v] > outdeg[best] - indeg[best])) best = v;
        front.push_back(best);
        remove(best);
    }
    front.insert(front.end(), back.rbegin(), back.rend());
    return front;
}

struct Acyclic {
    Graph graph;
    /// Indices into the input's edge list of the edges that were reversed.
    std::vector<std::size_t> inverted;
    std::size_t dropped_self_loops = 0;
};

/// Reverses every edge that points backwards in the heuristic vertex order.
/// Self-loops cannot be fixed by reversal and are removed (and counted).
inline Acyclic eliminate_cycles(const Graph& g) {
    if (!g.directed()) throw InvalidGraph("cycle elimination needs a directed graph");
    auto order = els_order(g);
    std::vector<std::size_t> pos(g.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    Acyclic result;
    std::vector<EdgeRecord> edges;
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        auto arc = g.arcs()[k];
        EdgeRecord e = g.edges()[k];
        if (arc.source == arc.target) {
            ++result.dropped_self_loops;
            continue;
        }
        if (pos[arc.source] > pos[arc.target]) {
            std::swap(e.source, e.target);
            result.inverted.push_back(k);
        }
        edges.push_back(std::move(e));
    }
    result.graph = build_graph(true, g.nodes(), std::move(edges), g.graph_attrs());
    return result;
}

/// Dedup, connect, eliminate cycles, then dedup again: connecting and
/// reorienting can make two distinct inputs coincide.
inline std::vector<Graph> sanitize_north(const std::vector<Graph>& graphs, std::uint64_t rng_seed) {
    for (const auto& g : graphs)
        if (!g.directed()) throw InvalidGraph("sanitize_north expects directed graphs");
    auto unique = dedup_labeled(graphs);
    std::vector<Graph> out;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        auto connected = connect_randomly(unique[i], derive_seed(rng_seed, i));
        out.push_back(eliminate_cycles(connected.graph).graph);
    }
    return dedup_labeled(out);
}

/// Text recorded as the creation method of generated graphs.
inline std::string provenance(const MutationConfig& cfg, const std::string& seed_name, std::size_t round) {
    std::ostringstream s;
    s << "generator=rome-mutation; seed-graph=" << seed_name << "; round=" << round << "/" << cfg.rounds
      << "; ops-per-round=" << cfg.ops_per_round << "; op-probabilities=";
    for (std::size_t i = 0; i < 5; ++i) s << (i ? "," : "") << mutation_op_names[i] << ":" << cfg.op_probabilities[i];
    s << "; epsilon=" << cfg.epsilon << "; size-bounds=" << cfg.min_n << ".." << cfg.max_n << "; rng-seed=" << cfg.rng_seed
      << "; filter=connected:" << (cfg.filter.require_connected ? "yes" : "no") << ",density:" << cfg.filter.density_low
      << ".." << cfg.filter.density_high << ",max-degree-histogram-distance:" << cfg.filter.max_degree_seq_distance;
    return s.str();
}

inline std::string north_provenance(std::uint64_t rng_seed, std::size_t inputs, std::size_t outputs) {
    return "generator=north-sanitize; steps=dedup-labeled,connect-randomly,eliminate-cycles(eades-lin-smyth),dedup-labeled; "
           "inputs=" + std::to_string(inputs) + "; outputs=" + std::to_string(outputs) + "; rng-seed=" + std::to_string(rng_seed);
}

} // namespace oga::generators
