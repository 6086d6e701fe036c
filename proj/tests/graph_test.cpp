#include "rsr/graph.hpp"
#include "rsr/spatial_index.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace rsr;
using rsr::testing::Gen;

namespace {

using EdgeSet = std::set<std::pair<VertexId, VertexId>>;

EdgeSet graph_edges(const Graph& g)
{
    EdgeSet out;
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        for (VertexId v : g.neighbors(u)) {
            if (u < v) {
                out.insert({u, v});
            }
        }
    }
    return out;
}

// Brute-force kNN graph over all pairs, same filter and culling rules.
EdgeSet brute_knn_graph(const std::vector<Point3>& pts, const std::vector<UnitNormal>& nrm, const Params& p)
{
    EdgeSet pairs;
    for (VertexId i = 0; i < pts.size(); ++i) {
        std::vector<std::pair<double, VertexId>> d;
        for (VertexId j = 0; j < pts.size(); ++j) {
            d.push_back({squared_norm(pts[i] - pts[j]), j});
        }
        std::sort(d.begin(), d.end());
        for (std::size_t r = 0; r < std::min<std::size_t>(p.k + 1, d.size()); ++r) {
            if (d[r].second != i) {
                pairs.insert({std::min(i, d[r].second), std::max(i, d[r].second)});
            }
        }
    }
    std::vector<std::pair<VertexId, VertexId>> kept;
    double sum = 0.0;
    for (const auto& [u, v] : pairs) {
        if (dot(nrm[u].vec(), nrm[v].vec()) >= std::cos(p.theta)) {
            kept.push_back({u, v});
            sum += distance(pts[u], pts[v]);
        }
    }
    EdgeSet out;
    for (const auto& [u, v] : kept) {
        if (distance(pts[u], pts[v]) <= p.r * sum / kept.size()) {
            out.insert({u, v});
        }
    }
    return out;
}

std::vector<std::uint32_t> union_find_labels(std::size_t n, const EdgeSet& edges)
{
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    const auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (const auto& [u, v] : edges) {
        const auto a = find(u);
        const auto b = find(v);
        parent[std::max(a, b)] = std::min(a, b);
    }
    // Dense labels ordered by lowest member.
    std::vector<std::uint32_t> label(n, 0xffffffffu);
    std::vector<std::uint32_t> out(n);
    std::uint32_t next = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto r = find(v);
        if (label[r] == 0xffffffffu) {
            label[r] = next++;
        }
        out[v] = label[r];
    }
    return out;
}

struct SmallGraph {
    std::size_t n;
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<double> lengths;
};

// Random connected graph: a random tree plus extra edges, small integer weights for ties.
SmallGraph random_connected(Gen& g, std::size_t n)
{
    SmallGraph s{n, {}, {}};
    std::set<std::pair<VertexId, VertexId>> seen;
    const auto add = [&](VertexId a, VertexId b) {
        const auto e = std::make_pair(std::min(a, b), std::max(a, b));
        if (a != b && seen.insert(e).second) {
            s.edges.push_back(e);
            s.lengths.push_back(1.0 + g.index(5));
        }
    };
    for (VertexId v = 1; v < n; ++v) {
        add(v, g.index(v));
    }
    const std::size_t extra = g.index(static_cast<std::uint32_t>(n * (n - 1) / 2 - (n - 1) + 1));
    for (std::size_t i = 0; i < extra; ++i) {
        add(g.index(n), g.index(n));
    }
    return s;
}

double exhaustive_min_spanning_weight(const SmallGraph& s)
{
    const std::size_t m = s.edges.size();
    const std::size_t need = s.n - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> pick(m, false);
    std::fill(pick.begin(), pick.begin() + need, true);
    do {
        std::vector<std::uint32_t> parent(s.n);
        std::iota(parent.begin(), parent.end(), 0u);
        const auto find = [&](std::uint32_t x) {
            while (parent[x] != x) {
                x = parent[x];
            }
            return x;
        };
        bool acyclic = true;
        double w = 0.0;
        for (std::size_t i = 0; i < m && acyclic; ++i) {
            if (!pick[i]) {
                continue;
            }
            const auto a = find(s.edges[i].first);
            const auto b = find(s.edges[i].second);
            if (a == b) {
                acyclic = false;
            }
            parent[a] = b;
            w += s.lengths[i];
        }
        if (acyclic) {
            best = std::min(best, w);
        }
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

} // namespace

TEST(Graph, FromEdgesDedupsAndPairsTwins)
{
    const std::vector<std::pair<VertexId, VertexId>> e{{0, 1}, {1, 0}, {1, 2}, {2, 2}, {3, 1}};
    const std::vector<double> len{1.0, 1.0, 2.0, 5.0, 3.0};
    const Graph g = Graph::from_edges(5, e, len);
    EXPECT_EQ(g.edge_count(), 3u);
    EXPECT_EQ(g.degree(1), 3u);
    EXPECT_EQ(g.degree(4), 0u);
    for (std::uint32_t s = 0; s < g.targets.size(); ++s) {
        EXPECT_EQ(g.twins[g.twins[s]], s);
        EXPECT_EQ(g.lengths[s], g.lengths[g.twins[s]]);
    }
    EXPECT_TRUE(g.has_edge(3, 1));
    EXPECT_FALSE(g.has_edge(0, 2));
    EXPECT_EQ(g.find_slot(0, 4), Graph::kNoSlot);
    EXPECT_NEAR(g.mean_length, 2.0, 1e-12);
    EXPECT_EQ(g.l_max, 3.0);
    EXPECT_EQ(g.component_count, 2u);
}

TEST(Graph, KnnMatchesBruteForce)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto cloud = rsr::testing::plane_grid(12, 12, 1.0, 0.3, seed);
        Params p;
        p.k = 4 + static_cast<std::uint32_t>(seed);
        const KdTree tree(cloud.positions);
        const Graph g = build_knn_graph(cloud.positions, cloud.normals, tree, p);
        EXPECT_EQ(graph_edges(g), brute_knn_graph(cloud.positions, cloud.normals, p)) << seed;
        for (VertexId u = 0; u < g.vertex_count(); ++u) {
            EXPECT_GE(g.degree(u), p.k);
            EXPECT_TRUE(std::is_sorted(g.neighbors(u).begin(), g.neighbors(u).end()));
        }
    }
}

TEST(Graph, OpposingSheetsStaySeparate)
{
    auto lower = rsr::testing::plane_grid(10, 10, 0.1, 0.0, 0);
    std::vector<Point3> pts = lower.positions;
    std::vector<UnitNormal> nrm(pts.size(), UnitNormal::from_unit({0, 0, -1}));
    for (const auto& p : lower.positions) {
        pts.push_back({p.x, p.y, 0.05});
        nrm.push_back(UnitNormal::from_unit({0, 0, 1}));
    }
    const KdTree tree(pts);
    const Graph g = build_knn_graph(pts, nrm, tree, Params{});
    EXPECT_EQ(g.component_count, 2u);
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        for (VertexId v : g.neighbors(u)) {
            EXPECT_EQ(u < 100, v < 100);
        }
    }
}

TEST(Graph, OutlierEdgesCulled)
{
    auto cloud = rsr::testing::plane_grid(20, 20, 0.1, 0.2, 3);
    cloud.positions.push_back({100.0, 0.0, 0.0});
    cloud.normals.push_back(UnitNormal::from_unit({0, 0, 1}));
    Params p;
    p.k = 6;
    const KdTree tree(cloud.positions);
    const Graph g = build_knn_graph(cloud.positions, cloud.normals, tree, p);
    EXPECT_EQ(g.degree(400), 0u);
    EXPECT_EQ(g.component_count, 2u);
    EXPECT_EQ(g.component[400], 1u);
    EXPECT_LT(g.l_max, 1.0);
}

TEST(Graph, ProjectionMetricWhenNoisy)
{
    auto cloud = rsr::testing::plane_grid(8, 8, 0.1, 0.2, 4);
    Gen gen(4);
    for (auto& q : cloud.positions) {
        q.z = gen.uniform(-0.05, 0.05);
    }
    Params p;
    p.k = 6;
    p.noisy = true;
    const KdTree tree(cloud.positions);
    const Graph g = build_knn_graph(cloud.positions, cloud.normals, tree, p);
    EXPECT_EQ(g.metric, EdgeMetric::Projection);
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        for (std::uint32_t s = g.begin(u); s < g.end(u); ++s) {
            const Point3& a = cloud.positions[u];
            const Point3& b = cloud.positions[g.targets[s]];
            EXPECT_NEAR(g.lengths[s], std::hypot(a.x - b.x, a.y - b.y), 1e-12);
        }
    }
    EXPECT_GE(g.l_max_euclidean, g.l_max);
}

TEST(Graph, ComponentsMatchUnionFind)
{
    Gen g(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + g.index(60);
        EdgeSet edges;
        const std::size_t m = g.index(static_cast<std::uint32_t>(n + 1));
        for (std::size_t i = 0; i < m; ++i) {
            const VertexId a = g.index(n);
            const VertexId b = g.index(n);
            if (a != b) {
                edges.insert({std::min(a, b), std::max(a, b)});
            }
        }
        const std::vector<std::pair<VertexId, VertexId>> list(edges.begin(), edges.end());
        const Graph graph = Graph::from_edges(n, list, std::vector<double>(list.size(), 1.0));
        std::uint32_t count = 0;
        const auto labels = connected_components(graph, &count);
        const auto want = union_find_labels(n, edges);
        EXPECT_EQ(labels, want);
        EXPECT_EQ(graph.component, want);
        EXPECT_EQ(count, *std::max_element(want.begin(), want.end()) + 1);
    }
}

TEST(Graph, MstMatchesExhaustiveMinimum)
{
    Gen g(42);
    for (int trial = 0; trial < 200; ++trial) {
        const SmallGraph s = random_connected(g, 2 + g.index(7));
        const Graph graph = Graph::from_edges(s.n, s.edges, s.lengths);
        const auto mst = minimum_spanning_tree(graph, 0);
        ASSERT_EQ(mst.size(), s.n - 1);
        double w = 0.0;
        EdgeSet tree;
        for (const auto& e : mst) {
            EXPECT_LT(e.u, e.v);
            EXPECT_TRUE(graph.has_edge(e.u, e.v));
            w += e.length;
            tree.insert({e.u, e.v});
        }
        EXPECT_EQ(w, exhaustive_min_spanning_weight(s)) << "trial " << trial;
        EXPECT_EQ(union_find_labels(s.n, tree), std::vector<std::uint32_t>(s.n, 0u));
    }
}

TEST(Graph, MstStaysInRootComponent)
{
    const std::vector<std::pair<VertexId, VertexId>> e{{0, 1}, {1, 2}, {3, 4}};
    const Graph g = Graph::from_edges(5, e, std::vector<double>{1, 2, 3});
    const auto mst = minimum_spanning_tree(g, 3);
    ASSERT_EQ(mst.size(), 1u);
    EXPECT_EQ(mst[0], (WeightedEdge{3, 4, 3.0}));
}

TEST(Graph, SortEdgesBreaksTiesByIndex)
{
    const std::vector<std::pair<VertexId, VertexId>> e{{2, 3}, {0, 3}, {1, 2}, {0, 1}, {4, 5}};
    const Graph g = Graph::from_edges(6, e, std::vector<double>{1, 1, 0.5, 1, 0.1});
    const auto sorted = sort_edges(g, 0);
    const std::vector<WeightedEdge> want{{1, 2, 0.5}, {0, 1, 1.0}, {0, 3, 1.0}, {2, 3, 1.0}};
    EXPECT_EQ(sorted, want);
    const auto all = sort_edges_by_component(g);
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0], want);
    EXPECT_EQ(all[1], (std::vector<WeightedEdge>{{4, 5, 0.1}}));
}
