#include "rsr/mesh_out.hpp"
#include "rsr/reconstruct.hpp"
#include "rsr/spatial_index.hpp"
#include "rsr/synth.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <queue>

using namespace rsr;
using rsr::testing::Gen;

namespace {

// Owns everything a Reconstructor borrows.
struct Scene {
    std::vector<Point3> pts;
    std::vector<UnitNormal> nrm;
    Graph graph;
    std::unique_ptr<KdTree> tree;
    std::unique_ptr<Reconstructor> engine;

    Scene(std::vector<Point3> p, std::vector<UnitNormal> n, Graph g, const Params& params = {})
        : pts(std::move(p)), nrm(std::move(n)), graph(std::move(g))
    {
        tree = std::make_unique<KdTree>(pts);
        engine = std::make_unique<Reconstructor>(graph, pts, nrm, *tree, params);
    }
    Scene(Scene&&) = delete;

    static Scene from_cloud(const PointCloud& cloud, const Params& params = {})
    {
        const KdTree t(cloud.positions);
        Graph g = build_knn_graph(cloud.positions, cloud.normals, t, params);
        return Scene(cloud.positions, cloud.normals, std::move(g), params);
    }

    static Scene explicit_edges(std::vector<Point3> p, const std::vector<std::pair<VertexId, VertexId>>& edges,
                                const Params& params = {})
    {
        Graph g = rsr::testing::euclidean_graph(p, edges);
        auto n = rsr::testing::up_normals(p.size());
        return Scene(std::move(p), std::move(n), std::move(g), params);
    }
};

std::vector<std::pair<VertexId, VertexId>> complete_edges(std::size_t n)
{
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId a = 0; a < n; ++a) {
        for (VertexId b = a + 1; b < n; ++b) {
            e.push_back({a, b});
        }
    }
    return e;
}

std::vector<std::uint32_t> bfs_hops(const RotationSystem& rs, VertexId from)
{
    std::vector<std::uint32_t> d(rs.vertex_count(), 0xffffffffu);
    std::queue<VertexId> q;
    d[from] = 0;
    q.push(from);
    while (!q.empty()) {
        const VertexId x = q.front();
        q.pop();
        for (VertexId y : rs.graph().neighbors(x)) {
            if (rs.has_edge(x, y) && d[y] == 0xffffffffu) {
                d[y] = d[x] + 1;
                q.push(y);
            }
        }
    }
    return d;
}

std::int64_t euler(const RotationSystem& rs, std::size_t vertices)
{
    return static_cast<std::int64_t>(vertices) - static_cast<std::int64_t>(rs.mesh_edge_count()) +
           static_cast<std::int64_t>(rs.count_faces());
}

} // namespace

TEST(TopologyTest, MatchesOrbitMembership)
{
    // A strict quality bound leaves topologically valid edges out of the mesh.
    Params params;
    params.quality_min = deg_to_rad(40.0);
    Scene s = Scene::from_cloud(sample_sphere(600, 71), params);
    Reconstructor& r = *s.engine;
    r.init_component(0);
    r.edge_insertion_stage(0);
    const RotationSystem& rs = r.rotation_system();

    std::vector<std::uint32_t> label(s.graph.targets.size(), 0xffffffffu);
    std::uint32_t next = 0;
    for (HalfedgeId h = 0; h < label.size(); ++h) {
        if (rs.in_mesh(h) && label[h] == 0xffffffffu) {
            for (HalfedgeId x : rs.orbit(h)) {
                label[x] = next;
            }
            ++next;
        }
    }
    std::size_t pass = 0;
    std::size_t fail = 0;
    for (VertexId u = 0; u < s.pts.size(); ++u) {
        for (VertexId v : s.graph.neighbors(u)) {
            if (u > v || rs.has_edge(u, v)) {
                continue;
            }
            const Corner cu = rs.corner_of(u, v);
            const Corner cv = rs.corner_of(v, u);
            const std::uint32_t l = label[cu.h_next];
            const bool want = label[rs.iota(cu.h_prev)] == l && label[cv.h_next] == l && label[rs.iota(cv.h_prev)] == l;
            EXPECT_EQ(r.topology_test(u, v), want) << u << " " << v;
            (want ? pass : fail) += 1;
        }
    }
    EXPECT_GT(fail, 0u);
    EXPECT_GT(pass, 0u);
}

TEST(TopologyTest, ClosingASquare)
{
    Scene s = Scene::explicit_edges({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, complete_edges(4));
    Reconstructor& r = *s.engine;
    r.init_component(0);
    // Spanning tree is the path 3-0-1-2.
    EXPECT_TRUE(r.rotation_system().has_edge(0, 3));
    EXPECT_TRUE(r.rotation_system().has_edge(1, 2));
    EXPECT_FALSE(r.topology_test(0, 1));
    EXPECT_TRUE(r.topology_test(2, 3));
    EXPECT_TRUE(r.topology_test(0, 2));
}

TEST(GeometryTest, CrossingEdgeRejected)
{
    // Tree is 0-2, 2-3, 1-2; the short 2-3 edge blocks 0-1.
    Scene s = Scene::explicit_edges({{0, 0, 0}, {1, 0, 0}, {0.5, 0.2, 0}, {0.5, -0.2, 0}}, complete_edges(4));
    Reconstructor& r = *s.engine;
    r.init_component(0);
    ASSERT_TRUE(r.rotation_system().has_edge(2, 3));
    EXPECT_FALSE(r.geometry_test(0, 1));
    EXPECT_TRUE(r.geometry_test(0, 3));
    EXPECT_TRUE(r.geometry_test(1, 3));
}

TEST(GeometryTest, OpposedNormalsAreDegenerate)
{
    std::vector<Point3> p{{0, 0, 0}, {1, 0, 0}};
    Graph g = rsr::testing::euclidean_graph(p, {{0, 1}});
    std::vector<UnitNormal> n{UnitNormal::from_unit({0, 0, 1}), UnitNormal::from_unit({0, 0, -1})};
    Scene s(p, n, std::move(g));
    EXPECT_FALSE(s.engine->geometry_test(0, 1));
    EXPECT_EQ(s.engine->rejections().degenerate_plane, 1u);
}

TEST(GeometryTest, OtherComponentsNeverObstruct)
{
    // Two identical squares stacked; each is its own graph component.
    std::vector<Point3> p{{0, 0, 0}, {1, 0, 0}, {0.5, 0.2, 0}, {0.5, -0.2, 0}};
    for (int i = 0; i < 4; ++i) {
        p.push_back(p[i] + Vec3{0, 0, 1e-3});
    }
    auto edges = complete_edges(4);
    for (const auto& [a, b] : complete_edges(4)) {
        edges.push_back({a + 4, b + 4});
    }
    Scene s = Scene::explicit_edges(p, edges);
    s.engine->init_component(1);
    EXPECT_TRUE(s.engine->rotation_system().has_edge(6, 7));
    EXPECT_EQ(s.engine->rotation_system().mesh_degree(0), 0u);
    // 6-7 crosses 0-1 in projection but lives in the other component.
    EXPECT_TRUE(s.engine->geometry_test(0, 1));
    EXPECT_FALSE(s.engine->geometry_test(4, 5));
}

TEST(QualityTest, SliverRejected)
{
    Scene thin = Scene::explicit_edges({{0, 0, 0}, {1, 0, 0}, {0.5, 0.02, 0}}, complete_edges(3));
    thin.engine->init_component(0);
    EXPECT_FALSE(thin.engine->quality_test(0, 1));

    Scene good = Scene::explicit_edges({{0, 0, 0}, {1, 0, 0}, {0.5, 0.5, 0}}, complete_edges(3));
    good.engine->init_component(0);
    EXPECT_TRUE(good.engine->quality_test(0, 1));
}

TEST(QualityTest, OnlyTriangularSidesAreChecked)
{
    // Closing 0-1 leaves quadrilaterals on both sides, so no sliver forms.
    Scene s = Scene::explicit_edges({{0, 0, 0}, {1, 0, 0}, {0.5, 0.02, 0}, {1.4, 0.01, 0}},
                                    {{0, 2}, {2, 3}, {1, 3}, {0, 1}});
    s.engine->init_component(0);
    EXPECT_TRUE(s.engine->quality_test(0, 1));
}

TEST(HopDistance, MatchesBreadthFirstSearch)
{
    Scene s = Scene::from_cloud(sample_sphere(800, 72));
    s.engine->run();
    const RotationSystem& rs = s.engine->rotation_system();
    Gen g(72);
    for (int q = 0; q < 30; ++q) {
        const VertexId u = g.index(s.pts.size());
        const auto d = bfs_hops(rs, u);
        for (int k = 0; k < 20; ++k) {
            const VertexId v = g.index(s.pts.size());
            const std::uint32_t cap = g.index(12);
            const auto got = s.engine->hop_distance_capped(u, v, cap);
            if (d[v] <= cap) {
                ASSERT_TRUE(got.has_value());
                EXPECT_EQ(*got, d[v]);
            } else {
                EXPECT_FALSE(got.has_value());
            }
        }
    }
}

TEST(Reconstruct, ConvexPolygonsTriangulate)
{
    for (std::size_t n : {4u, 5u, 7u}) {
        std::vector<Point3> p;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = kTwoPi * i / n + 0.1;
            p.push_back({std::cos(a), std::sin(a), 0.0});
        }
        for (std::uint32_t genus : {0u, kUnboundedGenus}) {
            Params params;
            params.max_genus = genus;
            Scene s = Scene::explicit_edges(p, complete_edges(n), params);
            s.engine->run();
            const auto mesh = extract_triangles(s.engine->rotation_system(), s.pts);
            EXPECT_EQ(mesh.triangles.size(), n - 2) << n;
            EXPECT_EQ(mesh.hole_sizes, std::vector<std::size_t>{n}) << n;
            EXPECT_EQ(orientation_defects(mesh.triangles), 0u);
        }
    }
}

TEST(Reconstruct, EulerHoldsAfterEveryInsertion)
{
    const auto cloud = sample_sphere(400, 73);
    Scene s = Scene::from_cloud(cloud);
    std::size_t events = 0;
    s.engine->set_observer([&](const RotationSystem& rs, const InsertionEvent& ev) {
        if (ev.kind != InsertionKind::Handle) {
            ASSERT_EQ(euler(rs, cloud.size()), 2);
        }
        ++events;
    });
    s.engine->run();
    EXPECT_GT(events, cloud.size());
    const auto mesh = extract_triangles(s.engine->rotation_system(), s.pts);
    EXPECT_EQ(mesh.triangles.size(), 2 * cloud.size() - 4);
    EXPECT_TRUE(mesh.hole_sizes.empty());
}

TEST(Reconstruct, TorusGetsOneHandleUnlessCapped)
{
    const auto cloud = sample_torus(4000, 2.0, 0.7, 0);
    Scene open = Scene::from_cloud(cloud);
    open.engine->run();
    ASSERT_EQ(open.engine->components().size(), 1u);
    EXPECT_EQ(open.engine->components()[0].genus, 1u);
    EXPECT_EQ(open.engine->components()[0].handles.size(), 1u);

    Params capped;
    capped.max_genus = 0;
    Scene closed = Scene::from_cloud(cloud, capped);
    std::size_t handles = 0;
    closed.engine->set_observer([&](const RotationSystem&, const InsertionEvent& ev) {
        handles += ev.kind == InsertionKind::Handle;
    });
    closed.engine->run();
    EXPECT_EQ(handles, 0u);
    EXPECT_TRUE(closed.engine->components()[0].handles.empty());
    EXPECT_EQ(closed.engine->components()[0].queue_processed, closed.engine->components()[0].queue_size);
}

TEST(Reconstruct, HandleCandidatesEmptyOnSphere)
{
    Scene s = Scene::from_cloud(sample_sphere(1000, 74));
    Reconstructor& r = *s.engine;
    r.init_component(0);
    r.edge_insertion_stage(0);
    EXPECT_TRUE(r.find_handle_candidates(0).empty());
    EXPECT_EQ(r.connect_handles(0, {}), 0u);
}

TEST(Reconstruct, Deterministic)
{
    const auto cloud = sample_torus(1500, 2.0, 0.7, 5);
    std::vector<std::vector<Triangle>> runs;
    for (int i = 0; i < 2; ++i) {
        Scene s = Scene::from_cloud(cloud);
        s.engine->run();
        runs.push_back(extract_triangles(s.engine->rotation_system(), s.pts).triangles);
    }
    EXPECT_EQ(runs[0], runs[1]);
}
