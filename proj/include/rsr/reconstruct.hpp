#pragma once

#include "rsr/core.hpp"
#include "rsr/faces.hpp"
#include "rsr/graph.hpp"
#include "rsr/rotation.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace rsr {

class KdTree;

enum class InsertionKind { Tree, Edge, Handle, Triangulation };

struct InsertionEvent {
    std::uint32_t component = 0;
    VertexId u = kInvalidVertex;
    VertexId v = kInvalidVertex;
    InsertionKind kind = InsertionKind::Edge;
};

/// Called after every edge insertion, with the rotation system already updated.
using InsertionObserver = std::function<void(const RotationSystem&, const InsertionEvent&)>;

struct ComponentState {
    std::uint32_t id = 0;
    VertexId root = kInvalidVertex; // lowest vertex index
    std::size_t vertex_count = 0;
    std::size_t queue_size = 0;
    std::size_t queue_processed = 0;
    std::size_t inserted = 0; // accepted by the insertion stage, tree edges excluded
    std::uint32_t genus = 0;
    std::vector<std::pair<VertexId, VertexId>> handles;
};

/// Counts of rejected candidates per test, for diagnostics.
struct RejectionStats {
    std::size_t topology = 0;
    std::size_t geometry = 0;
    std::size_t degenerate_plane = 0;
    std::size_t quality = 0;
};

/// The reconstruction engine over a prepared graph. Positions and normals are
/// the working (possibly smoothed) ones; `tree` indexes the same positions.
class Reconstructor {
public:
    Reconstructor(const Graph& graph, std::span<const Point3> positions, std::span<const UnitNormal> normals,
                  const KdTree& tree, const Params& params);

    void set_observer(InsertionObserver observer) { observer_ = std::move(observer); }

    /// Runs every stage on every component with at least two vertices.
    void run();

    // Stages, exposed for tests and instrumentation.
    void init_component(std::uint32_t comp);
    void edge_insertion_stage(std::uint32_t comp);
    std::vector<WeightedEdge> find_handle_candidates(std::uint32_t comp);
    std::size_t connect_handles(std::uint32_t comp, std::span<const WeightedEdge> candidates);
    std::size_t triangulate();

    // Tests on a candidate {u,v} not in the mesh.
    bool topology_test(VertexId u, VertexId v) const;
    bool geometry_test(VertexId u, VertexId v);
    bool quality_test(VertexId u, VertexId v) const;

    /// Fewest mesh edges between u and v, or nullopt when more than `cap`.
    std::optional<std::uint32_t> hop_distance_capped(VertexId u, VertexId v, std::uint32_t cap);

    const RotationSystem& rotation_system() const { return rs_; }
    const FaceTracker& faces() const { return faces_; }
    const Graph& graph() const { return graph_; }
    const std::vector<ComponentState>& components() const { return components_; }
    const RejectionStats& rejections() const { return rejections_; }
    std::span<const VertexId> handle_vertices() const { return handle_vertices_; }

    double init_ms() const { return init_ms_; }
    double insertion_ms() const { return insertion_ms_; }
    double handles_ms() const { return handles_ms_; }
    double triangulation_ms() const { return triangulation_ms_; }

private:
    bool topology_ok(const Corner& cu, const Corner& cv) const;
    bool quality_ok(VertexId u, VertexId v, const Corner& cu, const Corner& cv) const;
    void notify(std::uint32_t comp, VertexId u, VertexId v, InsertionKind kind);
    void explore(VertexId x);

    const Graph& graph_;
    std::span<const Point3> positions_;
    std::span<const UnitNormal> normals_;
    const KdTree& tree_;
    Params params_;

    RotationSystem rs_;
    FaceTracker faces_;
    std::vector<ComponentState> components_;
    std::vector<std::vector<WeightedEdge>> queues_;
    RejectionStats rejections_;
    InsertionObserver observer_;

    // Face labels frozen at the end of edge insertion, per halfedge.
    std::vector<std::uint32_t> face_label_;
    std::vector<std::uint32_t> label_parent_;
    std::vector<VertexId> handle_vertices_;

    // Scratch for radius queries and BFS.
    std::vector<VertexId> ball_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t epoch_ = 0;
    std::vector<std::uint32_t> hop_mark_;
    std::vector<std::uint32_t> hop_dist_;
    std::uint32_t hop_epoch_ = 0;

    struct Ear {
        double length;
        VertexId a;
        VertexId b;
        HalfedgeId h1;
        HalfedgeId h2;
        bool operator>(const Ear& o) const;
    };
    std::vector<Ear> ears_;

    double init_ms_ = 0.0;
    double insertion_ms_ = 0.0;
    double handles_ms_ = 0.0;
    double triangulation_ms_ = 0.0;
};

} // namespace rsr
