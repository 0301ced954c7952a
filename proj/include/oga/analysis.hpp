#pragma once

#include <oga/analysis/components.hpp>
#include <oga/analysis/connectivity.hpp>
#include <oga/analysis/planarity.hpp>
#include <oga/error.hpp>
#include <oga/graph.hpp>

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oga::analysis {

struct AnalysisConfig {
    /// Graphs with at least this many nodes only get counts and degree statistics.
    std::size_t vertex_threshold = 100'000;
    /// Wall-clock budget per graph; zero disables it.
    std::chrono::milliseconds time_budget{30'000};
};

inline void validate(const AnalysisConfig& cfg) {
    if (cfg.vertex_threshold == 0) throw InvalidConfig("vertex_threshold must be positive");
    if (cfg.time_budget.count() < 0) throw InvalidConfig("time_budget must not be negative");
}

/// Optional fields are unset when the analysis was skipped or ran out of time;
/// `skipped_fields` names them.
struct PropertySet {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    bool directed = false;
    double min_degree = 0;
    double max_degree = 0;
    double avg_degree = 0;

    std::optional<double> density;
    std::optional<bool> has_self_loops;
    std::optional<bool> has_multi_edges;
    std::optional<bool> is_connected;
    std::optional<std::size_t> connected_component_count;
    std::optional<bool> is_bipartite;
    std::optional<bool> is_acyclic;
    std::optional<std::size_t> biconnected_component_count;
    std::optional<bool> is_planar;
    std::optional<std::size_t> vertex_connectivity;
    /// Supplied by users, never computed.
    std::optional<std::int64_t> crossing_number;

    bool analysis_skipped = false;
    std::string skip_reason;
    std::vector<std::string> skipped_fields;

    bool operator==(const PropertySet&) const = default;
};

inline const std::vector<std::string>& computed_field_names() {
    static const std::vector<std::string> names{
        "density", "has_self_loops", "has_multi_edges", "is_connected", "connected_component_count",
        "is_bipartite", "is_acyclic", "biconnected_component_count", "is_planar", "vertex_connectivity"};
    return names;
}

struct EdgeShape {
    /// Distinct non-loop endpoint pairs (ordered for directed graphs).
    std::size_t simple_edges = 0;
    bool loops = false;
    bool parallel = false;
};

inline EdgeShape edge_shape(const Graph& g) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    EdgeShape s;
    for (const auto& arc : g.arcs()) {
        auto key = g.directed() ? std::pair{arc.source, arc.target}
                                : std::pair{std::min(arc.source, arc.target), std::max(arc.source, arc.target)};
        bool fresh = seen.insert(key).second;
        if (!fresh) s.parallel = true;
        if (arc.source == arc.target) s.loops = true;
        else if (fresh) ++s.simple_edges;
    }
    return s;
}

inline PropertySet analyze(const Graph& g, const AnalysisConfig& cfg = {}) {
    validate(cfg);
    PropertySet p;
    p.node_count = g.node_count();
    p.edge_count = g.edge_count();
    p.directed = g.directed();
    auto deg = degrees(g);
    if (!deg.empty()) {
        auto [lo, hi] = std::minmax_element(deg.begin(), deg.end());
        p.min_degree = static_cast<double>(*lo);
        p.max_degree = static_cast<double>(*hi);
        p.avg_degree = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
    }
    if (p.node_count >= cfg.vertex_threshold) {
        p.analysis_skipped = true;
        p.skip_reason = "node count " + std::to_string(p.node_count) + " reaches the analysis threshold of " +
                        std::to_string(cfg.vertex_threshold);
        p.skipped_fields = computed_field_names();
        return p;
    }

    Deadline deadline;
    if (cfg.time_budget.count() > 0) deadline = std::chrono::steady_clock::now() + cfg.time_budget;

    try {
        const double n = static_cast<double>(p.node_count);
        auto shape = edge_shape(g);
        const double simple_m = static_cast<double>(shape.simple_edges);
        p.density = p.node_count < 2 ? 0.0 : (g.directed() ? 1.0 : 2.0) * simple_m / (n * (n - 1));
        p.has_self_loops = shape.loops;
        p.has_multi_edges = shape.parallel;
        check_deadline(deadline);

        std::size_t components = connected_components(g).size();
        p.connected_component_count = components;
        p.is_connected = components == 1;
        p.is_bipartite = is_bipartite(g);
        p.is_acyclic = is_acyclic(g);
        check_deadline(deadline);

        SimpleView view(g);
        p.biconnected_component_count = biconnected_components(view).components.size();
        check_deadline(deadline);
        p.is_planar = is_planar(view);
        check_deadline(deadline);
        p.vertex_connectivity = vertex_connectivity(view, deadline);
    } catch (const TimeBudgetExceeded&) {
        p.analysis_skipped = true;
        p.skip_reason = "time budget of " + std::to_string(cfg.time_budget.count()) + " ms exceeded";
    }
    auto mark = [&](const char* name, bool present) {
        if (!present) p.skipped_fields.push_back(name);
    };
    mark("density", p.density.has_value());
    mark("has_self_loops", p.has_self_loops.has_value());
    mark("has_multi_edges", p.has_multi_edges.has_value());
    mark("is_connected", p.is_connected.has_value());
    mark("connected_component_count", p.connected_component_count.has_value());
    mark("is_bipartite", p.is_bipartite.has_value());
    mark("is_acyclic", p.is_acyclic.has_value());
    mark("biconnected_component_count", p.biconnected_component_count.has_value());
    mark("is_planar", p.is_planar.has_value());
    mark("vertex_connectivity", p.vertex_connectivity.has_value());
    return p;
}

} // namespace oga::analysis
