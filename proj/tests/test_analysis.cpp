#include <oga/analysis.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace oga;
using namespace oga::analysis;
using oga::testing::complete;
using oga::testing::complete_bipartite;
using oga::testing::cycle;
using oga::testing::from_pairs;
using oga::testing::path;

namespace {

Graph grid(std::size_t rows, std::size_t cols, bool diagonals = false) {
    std::vector<std::pair<int, int>> pairs;
    auto id = [&](std::size_t r, std::size_t c) { return int(r * cols + c); };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) pairs.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) pairs.emplace_back(id(r, c), id(r + 1, c));
            if (diagonals && r + 1 < rows && c + 1 < cols) pairs.emplace_back(id(r, c), id(r + 1, c + 1));
        }
    }
    return from_pairs(rows * cols, pairs);
}

} // namespace

TEST(Analyze, CompleteGraphK4) {
    auto p = analyze(complete(4));
    EXPECT_EQ(p.node_count, 4u);
    EXPECT_EQ(p.edge_count, 6u);
    EXPECT_DOUBLE_EQ(*p.density, 1.0);
    EXPECT_TRUE(*p.is_connected);
    EXPECT_EQ(*p.vertex_connectivity, 3u);
    EXPECT_TRUE(*p.is_planar);
    EXPECT_FALSE(*p.is_bipartite);
    EXPECT_FALSE(p.analysis_skipped);
    EXPECT_TRUE(p.skipped_fields.empty());
    EXPECT_FALSE(p.crossing_number);
}

TEST(Analyze, DirectedTriangle) {
    auto p = analyze(cycle(3, true));
    EXPECT_TRUE(p.directed);
    EXPECT_FALSE(*p.is_acyclic);
    EXPECT_EQ(*p.connected_component_count, 1u);
    EXPECT_EQ(*p.vertex_connectivity, 2u);
    EXPECT_DOUBLE_EQ(*p.density, 0.5);
}

TEST(Analyze, ThresholdSkipsAnalysis) {
    Graph g = build_graph(false, oga::testing::plain_nodes(100'000), {});
    auto p = analyze(g);
    EXPECT_TRUE(p.analysis_skipped);
    EXPECT_EQ(p.node_count, 100'000u);
    EXPECT_EQ(p.edge_count, 0u);
    EXPECT_FALSE(p.is_connected);
    EXPECT_FALSE(p.is_planar);
    EXPECT_EQ(p.skipped_fields.size(), computed_field_names().size());
    EXPECT_NE(p.skip_reason.find("100000"), std::string::npos);
}

TEST(Analyze, JustBelowThresholdIsAnalyzed) {
    auto p = analyze(path(99'999));
    EXPECT_FALSE(p.analysis_skipped);
    EXPECT_TRUE(*p.is_connected);
    EXPECT_TRUE(*p.is_planar);
    EXPECT_TRUE(*p.is_acyclic);
    EXPECT_EQ(*p.vertex_connectivity, 1u);
    EXPECT_EQ(*p.biconnected_component_count, 99'998u);
}

TEST(Analyze, CustomThreshold) {
    AnalysisConfig cfg;
    cfg.vertex_threshold = 4;
    EXPECT_TRUE(analyze(complete(4), cfg).analysis_skipped);
    EXPECT_FALSE(analyze(complete(3), cfg).analysis_skipped);
    cfg.vertex_threshold = 0;
    EXPECT_THROW(analyze(complete(3), cfg), InvalidConfig);
}

TEST(Analyze, TimeBudgetMarksSkippedFields) {
    std::mt19937_64 rng(8);
    Graph g = oga::testing::random_graph(rng, 3000, 0.2);
    AnalysisConfig cfg;
    cfg.time_budget = std::chrono::milliseconds(1);
    auto p = analyze(g, cfg);
    EXPECT_TRUE(p.analysis_skipped);
    EXPECT_NE(p.skip_reason.find("time budget"), std::string::npos);
    ASSERT_FALSE(p.skipped_fields.empty());
    EXPECT_EQ(p.skipped_fields.back(), "vertex_connectivity");
    EXPECT_FALSE(p.vertex_connectivity);
    EXPECT_EQ(p.node_count, 3000u);
}

TEST(Analyze, LoopsAndMultiEdges) {
    Graph g = from_pairs(3, {{0, 1}, {1, 0}, {2, 2}, {1, 2}});
    auto p = analyze(g);
    EXPECT_TRUE(*p.has_self_loops);
    EXPECT_TRUE(*p.has_multi_edges);
    EXPECT_DOUBLE_EQ(*p.density, 2.0 / 3.0);
    EXPECT_EQ(p.max_degree, 3.0);
    EXPECT_FALSE(*p.is_acyclic);

    Graph d = from_pairs(2, {{0, 1}, {1, 0}}, true);
    auto q = analyze(d);
    EXPECT_FALSE(*q.has_multi_edges);
    EXPECT_DOUBLE_EQ(*q.density, 1.0);
    EXPECT_FALSE(*q.is_acyclic);
}

TEST(Analyze, EmptyAndSingleton) {
    auto e = analyze(Graph{});
    EXPECT_EQ(*e.connected_component_count, 0u);
    EXPECT_FALSE(*e.is_connected);
    EXPECT_EQ(*e.vertex_connectivity, 0u);
    EXPECT_DOUBLE_EQ(*e.density, 0.0);
    auto s = analyze(path(1));
    EXPECT_TRUE(*s.is_connected);
    EXPECT_EQ(*s.vertex_connectivity, 0u);
}

TEST(Analyze, Deterministic) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        Graph g = oga::testing::random_graph(rng, 30, 0.15, i % 2 == 0, true);
        EXPECT_EQ(analyze(g), analyze(g));
    }
}

TEST(Analyze, InvariantsOnRandomGraphs) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 400; ++i) {
        std::size_t n = 1 + i % 25;
        Graph g = oga::testing::random_graph(rng, n, 0.05 + 0.01 * (i % 40), i % 3 == 0, i % 5 == 0);
        auto p = analyze(g);
        SimpleView view(g);
        EXPECT_EQ(*p.is_connected, *p.connected_component_count == 1);
        if (n >= 2) {
            EXPECT_EQ(*p.vertex_connectivity >= 1, *p.is_connected);
        }
        std::size_t min_simple_degree = n;
        for (std::size_t v = 0; v < n; ++v) min_simple_degree = std::min(min_simple_degree, view.degree(v));
        if (n >= 2) {
            EXPECT_LE(*p.vertex_connectivity, min_simple_degree);
        }
        if (*p.is_planar && n >= 3) {
            EXPECT_LE(view.edge_count(), 3 * n - 6);
        }
        EXPECT_GE(*p.density, 0.0);
        EXPECT_LE(*p.density, 1.0);
        std::size_t covered = 0;
        for (const auto& c : biconnected_components(view).components) covered += c.size();
        EXPECT_EQ(covered, view.edge_count());
    }
}

TEST(Components, Examples) {
    EXPECT_EQ(connected_components(path(4)).size(), 1u);
    Graph two = from_pairs(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    auto cc = connected_components(two);
    ASSERT_EQ(cc.size(), 2u);
    EXPECT_EQ(cc[1], (std::vector<std::string>{"3", "4", "5"}));
    EXPECT_TRUE(connected_components(Graph{}).empty());
    EXPECT_EQ(connected_components(from_pairs(3, {{2, 0}}, true)).size(), 2u);
}

TEST(Biconnected, Examples) {
    auto bowtie = biconnected_components(from_pairs(5, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 2}}));
    EXPECT_EQ(bowtie.components.size(), 2u);
    EXPECT_EQ(bowtie.articulation_points, (std::vector<std::size_t>{2}));
    EXPECT_EQ(biconnected_components(cycle(5)).components.size(), 1u);
    auto tree = biconnected_components(from_pairs(4, {{0, 1}, {0, 2}, {0, 3}}));
    EXPECT_EQ(tree.components.size(), 3u);
    EXPECT_EQ(tree.articulation_points, (std::vector<std::size_t>{0}));
}

TEST(Biconnected, AgreesWithVertexRemovalOracle) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 400; ++i) {
        std::size_t n = 1 + i % 10;
        Graph g = oga::testing::random_graph(rng, n, 0.15 + 0.02 * (i % 20));
        oga::testing::Matrix mat(g);
        auto result = biconnected_components(g);

        std::size_t base = oga::testing::components_without(mat, 0);
        std::set<std::size_t> cut;
        std::size_t blocks = 0, with_edges = 0;
        std::vector<bool> isolated(n, true);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t w = 0; w < n; ++w)
                if (mat.adj[v][w]) isolated[v] = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (isolated[v]) continue;
            std::size_t without = oga::testing::components_without(mat, 1u << v);
            if (without > base) cut.insert(v);
            blocks += without - base;
        }
        // one block per component with an edge, plus what cut vertices split off
        for (const auto& comp : connected_components(g)) {
            bool has_edge = false;
            for (const auto& id : comp) has_edge = has_edge || !isolated[*g.index_of(id)];
            with_edges += has_edge;
        }
        blocks += with_edges;
        EXPECT_EQ(result.components.size(), blocks);
        EXPECT_EQ(std::set<std::size_t>(result.articulation_points.begin(), result.articulation_points.end()), cut);

        // Two edges share a block iff no single vertex separates them.
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        std::vector<std::size_t> block_of;
        for (std::size_t b = 0; b < result.components.size(); ++b)
            for (auto e : result.components[b]) edges.push_back(e), block_of.push_back(b);
        for (std::size_t x = 0; x < edges.size(); ++x) {
            for (std::size_t y = x + 1; y < edges.size(); ++y) {
                bool separated = false;
                for (std::size_t v = 0; v < n && !separated; ++v) {
                    std::size_t a = edges[x].first == v ? edges[x].second : edges[x].first;
                    std::size_t b = edges[y].first == v ? edges[y].second : edges[y].first;
                    std::uint32_t removed = 1u << v;
                    // connected in G - v?
                    std::vector<bool> seen(n, false);
                    std::vector<std::size_t> stack{a};
                    seen[a] = true;
                    while (!stack.empty()) {
                        auto u = stack.back();
                        stack.pop_back();
                        for (std::size_t w = 0; w < n; ++w)
                            if (mat.adj[u][w] && !seen[w] && !(removed >> w & 1)) seen[w] = true, stack.push_back(w);
                    }
                    separated = !seen[b];
                }
                EXPECT_EQ(block_of[x] == block_of[y], !separated);
            }
        }
    }
}

TEST(Connectivity, Examples) {
    EXPECT_EQ(vertex_connectivity(path(4)), 1u);
    EXPECT_EQ(vertex_connectivity(cycle(5)), 2u);
    EXPECT_EQ(vertex_connectivity(complete(4)), 3u);
    EXPECT_EQ(vertex_connectivity(complete(1)), 0u);
    EXPECT_EQ(vertex_connectivity(complete_bipartite(3, 4)), 3u);
    EXPECT_EQ(vertex_connectivity(from_pairs(4, {{0, 1}, {2, 3}})), 0u);
}

TEST(Connectivity, HypercubeAndGrid) {
    std::vector<std::pair<int, int>> cube;
    for (int v = 0; v < 32; ++v)
        for (int b = 0; b < 5; ++b)
            if (v < (v ^ (1 << b))) cube.emplace_back(v, v ^ (1 << b));
    EXPECT_EQ(vertex_connectivity(from_pairs(32, cube)), 5u);
    EXPECT_EQ(vertex_connectivity(grid(20, 20)), 2u);
}

TEST(Connectivity, AgreesWithExhaustiveSeparatorSearch) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 1500; ++i) {
        std::size_t n = 1 + i % 10;
        double p = 0.2 + 0.05 * (i % 16);
        Graph g = oga::testing::random_graph(rng, n, p);
        ASSERT_EQ(vertex_connectivity(g), oga::testing::brute_vertex_connectivity(oga::testing::Matrix(g)))
            << "graph " << i;
    }
}

TEST(Connectivity, HonoursDeadline) {
    std::mt19937_64 rng(5);
    Graph g = oga::testing::random_graph(rng, 1500, 0.3);
    Deadline past = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    EXPECT_THROW(vertex_connectivity(g, past), TimeBudgetExceeded);
}

TEST(Planarity, Examples) {
    EXPECT_TRUE(is_planar(complete(4)));
    EXPECT_FALSE(is_planar(complete(5)));
    EXPECT_FALSE(is_planar(complete_bipartite(3, 3)));
    EXPECT_TRUE(is_planar(complete_bipartite(2, 50)));
    EXPECT_TRUE(is_planar(Graph{}));
}

TEST(Planarity, Petersen) {
    Graph petersen = from_pairs(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 5}, {1, 6}, {2, 7}, {3, 8},
                                     {4, 9}, {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}});
    EXPECT_FALSE(is_planar(petersen));
    EXPECT_FALSE(oga::testing::brute_planar(oga::testing::Matrix(petersen)));
}

TEST(Planarity, AllGraphsUpToSixNodes) {
    for (std::size_t n = 1; n <= 6; ++n) {
        std::uint32_t pairs = static_cast<std::uint32_t>(n * (n - 1) / 2);
        for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
            Graph g = oga::testing::graph_from_mask(n, mask);
            ASSERT_EQ(is_planar(g), oga::testing::brute_planar(oga::testing::Matrix(g))) << "n=" << n << " mask=" << mask;
        }
    }
}

TEST(Planarity, RandomGraphsUpToEightNodes) {
    std::mt19937_64 rng(6);
    std::size_t nonplanar = 0;
    for (int i = 0; i < 600; ++i) {
        std::size_t n = 5 + i % 4;
        Graph g = oga::testing::random_graph(rng, n, 0.35 + 0.05 * (i % 8));
        bool expected = oga::testing::brute_planar(oga::testing::Matrix(g));
        ASSERT_EQ(is_planar(g), expected) << "graph " << i;
        nonplanar += !expected;
    }
    EXPECT_GT(nonplanar, 100u);
}

TEST(Planarity, LargeGraphs) {
    EXPECT_TRUE(is_planar(grid(300, 300, true)));

    // Outer vertices joined to three grid corners: one fits in the outer face,
    // three form a K3,3 with the corners.
    Graph g = grid(60, 60);
    auto nodes = g.nodes();
    auto edges = g.edges();
    auto hub = [&](const std::string& id) {
        nodes.push_back({id, {}, {}});
        for (const char* corner : {"0", "59", "3540"}) edges.push_back({id, corner, {}, {}, {}});
    };
    hub("x0");
    EXPECT_TRUE(is_planar(build_graph(false, nodes, edges)));
    hub("x1");
    hub("x2");
    EXPECT_FALSE(is_planar(build_graph(false, nodes, edges)));
}

TEST(Planarity, IgnoresLoopsMultiEdgesAndDirection) {
    Graph k4_messy = from_pairs(4, {{0, 1}, {1, 0}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 3}}, true);
    EXPECT_TRUE(is_planar(k4_messy));
}

TEST(BipartiteAcyclic, Examples) {
    EXPECT_TRUE(is_bipartite(cycle(4)));
    EXPECT_FALSE(is_bipartite(cycle(5)));
    EXPECT_TRUE(is_acyclic(path(3, true)));
    EXPECT_FALSE(is_acyclic(cycle(3)));
    EXPECT_TRUE(is_acyclic(path(3)));
}

TEST(BipartiteAcyclic, AgreeWithExhaustiveOracles) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 600; ++i) {
        std::size_t n = 1 + i % 7;
        Graph g = oga::testing::random_graph(rng, n, 0.1 + 0.05 * (i % 10), i % 2 == 0, i % 7 == 0);
        EXPECT_EQ(is_bipartite(g), oga::testing::brute_bipartite(g)) << i;
        EXPECT_EQ(is_acyclic(g), oga::testing::brute_acyclic(g)) << i;
    }
}
