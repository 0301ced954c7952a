#pragma once

#include <oga/error.hpp>
#include <oga/graph.hpp>
#include <oga/metadata.hpp>
#include <oga/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace oga::layout {

struct Point {
    double x = 0;
    double y = 0;
    bool operator==(const Point&) const = default;
};

struct Layout {
    /// Filled in by the archive when the layout is stored.
    std::string graph_id;
    std::map<std::string, Point> coordinates;
    std::string algorithm;
    std::optional<Timestamp> computed_at;

    bool operator==(const Layout&) const = default;
};

class LayoutMismatch : public Error {
public:
    explicit LayoutMismatch(const std::string& message) : Error("LayoutMismatch", message) {}
};

inline constexpr int default_iterations = 500;

namespace layout_detail {

/// Uniform scale into [0, 1]^2 keeping the aspect ratio, centred on the short axis.
inline void normalize(std::vector<Point>& pos) {
    if (pos.empty()) return;
    double minx = pos[0].x, maxx = pos[0].x, miny = pos[0].y, maxy = pos[0].y;
    for (const auto& p : pos) {
        minx = std::min(minx, p.x), maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y), maxy = std::max(maxy, p.y);
    }
    double w = maxx - minx, h = maxy - miny, scale = std::max(w, h);
    if (!(scale > 0) || !std::isfinite(scale)) {
        for (auto& p : pos) p = {0.5, 0.5};
        return;
    }
    double ox = (1 - w / scale) / 2, oy = (1 - h / scale) / 2;
    for (auto& p : pos) p = {std::clamp((p.x - minx) / scale + ox, 0.0, 1.0), std::clamp((p.y - miny) / scale + oy, 0.0, 1.0)};
}

} // namespace layout_detail

/// Fruchterman-Reingold spring embedding on the simple undirected view with
/// linear cooling. Repulsion is limited to nodes within 2k (grid buckets) once
/// the graph is large enough for the quadratic version to dominate.
inline Layout layout_force_directed(const Graph& g, int iterations = default_iterations, std::uint64_t rng_seed = 0) {
    if (iterations < 1) throw InvalidConfig("iterations must be at least 1");
    const std::size_t n = g.node_count();
    Rng rng(rng_seed);
    std::vector<Point> pos(n);
    for (auto& p : pos) p = {rng.uniform(), rng.uniform()};

    SimpleView view(g);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w : view.neighbors(v))
            if (v < w) edges.emplace_back(v, w);

    const double k = n > 0 ? std::sqrt(1.0 / static_cast<double>(n)) : 1.0;
    const bool bucketed = n > 300;
    const double t0 = 0.1;
    std::vector<Point> disp(n);
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
    auto cell_key = [](std::int64_t cx, std::int64_t cy) { return cx * 1'000'003 + cy; };

    for (int it = 0; it < iterations && n > 1; ++it) {
        std::fill(disp.begin(), disp.end(), Point{});
        auto repulse = [&](std::size_t i, std::size_t j) {
            double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
            double d2 = dx * dx + dy * dy;
            if (d2 < 1e-18) {
                // Coincident nodes: push apart along a fixed, index-derived direction.
                double a = static_cast<double>((i * 7919 + j * 104729) % 360) * 0.017453292519943295;
                dx = std::cos(a) * 1e-6, dy = std::sin(a) * 1e-6, d2 = 1e-12;
            }
            if (bucketed && d2 > 4 * k * k) return;
            double f = k * k / d2;
            disp[i].x += dx * f, disp[i].y += dy * f;
            disp[j].x -= dx * f, disp[j].y -= dy * f;
        };
        if (!bucketed) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) repulse(i, j);
        } else {
            grid.clear();
            const double cell = 2 * k;
            auto cell_of = [&](const Point& p) {
                return std::pair{static_cast<std::int64_t>(std::floor(p.x / cell)),
                                 static_cast<std::int64_t>(std::floor(p.y / cell))};
            };
            for (std::size_t i = 0; i < n; ++i) {
                auto [cx, cy] = cell_of(pos[i]);
                grid[cell_key(cx, cy)].push_back(i);
            }
            for (std::size_t i = 0; i < n; ++i) {
                auto [cx, cy] = cell_of(pos[i]);
                for (std::int64_t ddx = -1; ddx <= 1; ++ddx) {
                    for (std::int64_t ddy = -1; ddy <= 1; ++ddy) {
                        auto found = grid.find(cell_key(cx + ddx, cy + ddy));
                        if (found == grid.end()) continue;
                        for (std::size_t j : found->second)
                            if (j > i) repulse(i, j);
                    }
                }
            }
        }
        for (auto [a, b] : edges) {
            double dx = pos[a].x - pos[b].x, dy = pos[a].y - pos[b].y;
            double d = std::sqrt(dx * dx + dy * dy);
            double f = d / k;
            disp[a].x -= dx * f, disp[a].y -= dy * f;
            disp[b].x += dx * f, disp[b].y += dy * f;
        }
        double t = t0 * (1.0 - static_cast<double>(it) / static_cast<double>(iterations));
        for (std::size_t i = 0; i < n; ++i) {
            double len = std::sqrt(disp[i].x * disp[i].x + disp[i].y * disp[i].y);
            if (len <= 0 || !std::isfinite(len)) continue;
            double step = std::min(len, t);
            pos[i].x += disp[i].x / len * step;
            pos[i].y += disp[i].y / len * step;
        }
    }
    layout_detail::normalize(pos);

    Layout out;
    out.algorithm = "fruchterman-reingold iterations=" + std::to_string(iterations) + " seed=" + std::to_string(rng_seed);
    for (std::size_t i = 0; i < n; ++i) out.coordinates[g.nodes()[i].id] = pos[i];
    return out;
}

struct SvgStyle {
    double node_radius = 6;
    double edge_width = 1.5;
    bool labels = false;
};

namespace layout_detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace layout_detail

/// SVG 1.1 drawing on a 1000 x 1000 canvas: one <circle class="node"> per node
/// and one <line class="edge"> per edge. Self-loops are drawn as
/// <path class="edge loop">; directed graphs get an arrowhead marker.
inline std::string render_svg(const Graph& g, const Layout& layout, const SvgStyle& style = {}) {
    using layout_detail::num;
    if (layout.coordinates.size() != g.node_count())
        throw LayoutMismatch("layout covers " + std::to_string(layout.coordinates.size()) + " nodes, graph has " +
                             std::to_string(g.node_count()));
    std::vector<Point> px(g.node_count());
    const double margin = 40, span = 1000 - 2 * margin;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        auto it = layout.coordinates.find(g.nodes()[i].id);
        if (it == layout.coordinates.end()) throw LayoutMismatch("layout has no position for node '" + g.nodes()[i].id + "'");
        if (!std::isfinite(it->second.x) || !std::isfinite(it->second.y))
            throw LayoutMismatch("non-finite position for node '" + g.nodes()[i].id + "'");
        px[i] = {margin + it->second.x * span, margin + it->second.y * span};
    }

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    if (g.directed()) {
        s += "  <defs>\n    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\" "
             "markerHeight=\"8\" orient=\"auto-start-reverse\">\n      <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#444\"/>\n"
             "    </marker>\n  </defs>\n";
    }
    s += "  <rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
    s += "  <g stroke=\"#444\" stroke-width=\"" + num(style.edge_width) + "\" fill=\"none\">\n";
    const std::string marker = g.directed() ? " marker-end=\"url(#arrow)\"" : "";
    for (const auto& arc : g.arcs()) {
        Point a = px[arc.source], b = px[arc.target];
        if (arc.source == arc.target) {
            double r = style.node_radius * 2.5;
            s += "    <path class=\"edge loop\" d=\"M " + num(a.x) + " " + num(a.y - style.node_radius) + " C " +
                 num(a.x - r) + " " + num(a.y - 2 * r) + " " + num(a.x + r) + " " + num(a.y - 2 * r) + " " + num(a.x) + " " +
                 num(a.y - style.node_radius) + "\"" + marker + "/>\n";
            continue;
        }
        // Stop directed edges at the target's rim so the arrowhead stays visible.
        if (g.directed()) {
            double dx = b.x - a.x, dy = b.y - a.y, d = std::sqrt(dx * dx + dy * dy);
            if (d > style.node_radius) b = {b.x - dx / d * style.node_radius, b.y - dy / d * style.node_radius};
        }
        s += "    <line class=\"edge\" x1=\"" + num(a.x) + "\" y1=\"" + num(a.y) + "\" x2=\"" + num(b.x) + "\" y2=\"" +
             num(b.y) + "\"" + marker + "/>\n";
    }
    s += "  </g>\n";
    s += "  <g fill=\"#4a7ab5\" stroke=\"#1d3c61\">\n";
    for (std::size_t i = 0; i < g.node_count(); ++i)
        s += "    <circle class=\"node\" cx=\"" + num(px[i].x) + "\" cy=\"" + num(px[i].y) + "\" r=\"" +
             num(style.node_radius) + "\"/>\n";
    s += "  </g>\n";
    if (style.labels) {
        s += "  <g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000\">\n";
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto& node = g.nodes()[i];
            s += "    <text x=\"" + num(px[i].x + style.node_radius + 2) + "\" y=\"" + num(px[i].y - style.node_radius) +
                 "\">" + layout_detail::xml_escape(node.label.value_or(node.id)) + "</text>\n";
        }
        s += "  </g>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace oga::layout
