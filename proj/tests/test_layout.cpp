#include <oga/layout.hpp>

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <regex>

using namespace oga;
using namespace oga::layout;

namespace {

std::size_t count(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST(Layout, SingleNodeIsCentred) {
    auto l = layout_force_directed(oga::testing::path(1), 500, 1);
    ASSERT_EQ(l.coordinates.size(), 1u);
    EXPECT_EQ(l.coordinates.at("0"), (Point{0.5, 0.5}));
}

TEST(Layout, TwoNodesAreApart) {
    auto l = layout_force_directed(oga::testing::path(2), 500, 1);
    auto a = l.coordinates.at("0"), b = l.coordinates.at("1");
    EXPECT_GT(std::hypot(a.x - b.x, a.y - b.y), 0.5);
}

TEST(Layout, DeterministicPerSeed) {
    std::mt19937_64 rng(1);
    Graph g = oga::testing::random_graph(rng, 60, 0.08);
    EXPECT_EQ(layout_force_directed(g, 200, 42), layout_force_directed(g, 200, 42));
    EXPECT_NE(layout_force_directed(g, 200, 42), layout_force_directed(g, 200, 43));
}

TEST(Layout, CoordinatesNormalizedAndFinite) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {0, 1, 2, 5, 40, 400}) {
        Graph g = oga::testing::random_graph(rng, n, n ? 3.0 / double(n) : 0.0, false, true);
        auto l = layout_force_directed(g, 100, n);
        ASSERT_EQ(l.coordinates.size(), n);
        double minx = 1, maxx = 0, miny = 1, maxy = 0;
        for (const auto& [id, p] : l.coordinates) {
            ASSERT_TRUE(std::isfinite(p.x) && std::isfinite(p.y));
            EXPECT_GE(p.x, 0.0);
            EXPECT_LE(p.x, 1.0);
            EXPECT_GE(p.y, 0.0);
            EXPECT_LE(p.y, 1.0);
            minx = std::min(minx, p.x), maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y), maxy = std::max(maxy, p.y);
        }
        // Uniform scale: the longer side spans the unit interval.
        if (n >= 2) { EXPECT_NEAR(std::max(maxx - minx, maxy - miny), 1.0, 1e-9); }
    }
}

TEST(Layout, RejectsZeroIterations) {
    EXPECT_THROW(layout_force_directed(oga::testing::path(3), 0, 1), InvalidConfig);
}

TEST(Layout, CycleSpreadsOut) {
    // A drawn cycle should not collapse: every node keeps some distance from the rest.
    auto l = layout_force_directed(oga::testing::cycle(12), 500, 7);
    for (const auto& [a, p] : l.coordinates)
        for (const auto& [b, q] : l.coordinates)
            if (a != b) { EXPECT_GT(std::hypot(p.x - q.x, p.y - q.y), 0.05); }
}

TEST(Svg, TriangleElementCounts) {
    Graph k3 = oga::testing::complete(3);
    auto svg = render_svg(k3, layout_force_directed(k3, 50, 1));
    EXPECT_EQ(count(svg, "<circle"), 3u);
    EXPECT_EQ(count(svg, "<line"), 3u);
    EXPECT_EQ(count(svg, "marker"), 0u);
    EXPECT_NE(svg.find("viewBox=\"0 0 1000 1000\""), std::string::npos);
    EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
}

TEST(Svg, DirectedEdgesGetArrowheads) {
    Graph g = oga::testing::path(2, true);
    auto svg = render_svg(g, layout_force_directed(g, 50, 1));
    EXPECT_NE(svg.find("<marker id=\"arrow\""), std::string::npos);
    EXPECT_NE(svg.find("marker-end=\"url(#arrow)\""), std::string::npos);
}

TEST(Svg, EmptyGraph) {
    auto svg = render_svg(Graph{}, Layout{});
    EXPECT_EQ(count(svg, "<circle"), 0u);
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, ElementCountsMatchGraph) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        Graph g = oga::testing::random_graph(rng, 3 + i, 0.2, i % 2 == 0, true);
        auto svg = render_svg(g, layout_force_directed(g, 30, i));
        EXPECT_EQ(count(svg, "class=\"node\""), g.node_count());
        EXPECT_EQ(count(svg, "class=\"edge"), g.edge_count());
    }
}

TEST(Svg, LabelsAreEscaped) {
    Graph g = build_graph(false, {{"a", "x<&>y", {}}}, {});
    SvgStyle style;
    style.labels = true;
    auto svg = render_svg(g, layout_force_directed(g, 1, 0), style);
    EXPECT_NE(svg.find("x&lt;&amp;&gt;y"), std::string::npos);
}

TEST(Svg, MismatchedLayout) {
    Graph g = oga::testing::path(3);
    Layout l = layout_force_directed(oga::testing::path(2), 10, 0);
    EXPECT_THROW(render_svg(g, l), LayoutMismatch);
    l.coordinates["zz"] = {0, 0};
    EXPECT_THROW(render_svg(g, l), LayoutMismatch);
}
