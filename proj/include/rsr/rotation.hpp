#pragma once

#include "rsr/core.hpp"
#include "rsr/graph.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace rsr {

/// Halfedges are identified by their graph slot, so (u,v) exists for every
/// graph edge whether or not it is in the mesh.
using HalfedgeId = std::uint32_t;
inline constexpr HalfedgeId kNoHalfedge = 0xffffffffu;

class UnknownHalfedge : public std::invalid_argument {
public:
    UnknownHalfedge() : std::invalid_argument("halfedge is not part of the mesh") {}
};

class IsolatedVertex : public std::invalid_argument {
public:
    IsolatedVertex() : std::invalid_argument("vertex has no mesh edges") {}
};

/// Insertion point for a new halfedge at its tail: it goes after h_prev and
/// before h_next in counterclockwise order. A degree-1 vertex gives (h, h).
struct Corner {
    HalfedgeId h_prev = kNoHalfedge;
    HalfedgeId h_next = kNoHalfedge;
    bool operator==(const Corner&) const = default;
};

/// Rotation system of the growing mesh over a fixed candidate graph. Every
/// vertex keeps its graph neighbors in counterclockwise order about its
/// normal (the candidate ordering) and a cyclic list of the mesh halfedges,
/// which is always a subsequence of it.
class RotationSystem {
public:
    RotationSystem(const Graph& graph, std::span<const Point3> positions, std::span<const UnitNormal> normals);

    const Graph& graph() const { return *graph_; }
    std::size_t vertex_count() const { return graph_->vertex_count(); }

    HalfedgeId halfedge(VertexId u, VertexId v) const; // throws UnknownHalfedge if {u,v} is not a graph edge
    VertexId tail(HalfedgeId h) const { return tail_[h]; }
    VertexId head(HalfedgeId h) const { return graph_->targets[h]; }
    double angle(HalfedgeId h) const { return angle_[h]; }
    bool in_mesh(HalfedgeId h) const { return in_mesh_[h] != 0; }
    bool has_edge(VertexId u, VertexId v) const;

    /// Candidate ordering at u: graph slots sorted counterclockwise.
    std::span<const HalfedgeId> candidate_order(VertexId u) const;
    /// Vertices whose ordering needed a perturbed angle.
    std::span<const VertexId> perturbed_vertices() const { return perturbed_; }

    HalfedgeId iota(HalfedgeId h) const { return graph_->twins[h]; }
    HalfedgeId rho(HalfedgeId h) const;     // checked
    HalfedgeId rho_inv(HalfedgeId h) const; // checked
    HalfedgeId tau(HalfedgeId h) const { return rho(iota(h)); }

    // Unchecked variants for hot loops; h must be a mesh halfedge.
    HalfedgeId next(HalfedgeId h) const { return next_[h]; }
    HalfedgeId prev(HalfedgeId h) const { return prev_[h]; }
    HalfedgeId face_next(HalfedgeId h) const { return next_[graph_->twins[h]]; }

    std::uint32_t mesh_degree(VertexId u) const { return degree_[u]; }
    /// Some mesh halfedge leaving u, or kNoHalfedge.
    HalfedgeId any_halfedge(VertexId u) const { return anchor_[u]; }
    std::size_t mesh_edge_count() const { return edge_count_; }

    /// Where (u,v) would be inserted. Equal angles insert after the existing halfedge.
    Corner corner_of(VertexId u, VertexId v) const;
    /// Counterclockwise extent of the corner about the normal at u; 2π for (h, h).
    double corner_angle(const Corner& c) const;

    /// Splices (u,v) and (v,u) into their corners. Returns (u,v).
    HalfedgeId insert_edge(VertexId u, VertexId v);
    /// Same, with corners already computed by the caller.
    HalfedgeId insert_edge(VertexId u, VertexId v, const Corner& cu, const Corner& cv);

    /// Halfedges of the τ-orbit starting at h.
    std::vector<HalfedgeId> orbit(HalfedgeId h) const;
    /// Number of τ-orbits among all mesh halfedges.
    std::size_t count_faces() const;

private:
    void splice(HalfedgeId h, VertexId at, const Corner& c);

    const Graph* graph_;
    std::vector<VertexId> tail_;
    std::vector<double> angle_;
    std::vector<HalfedgeId> co_;          // CSR, same offsets as the graph
    std::vector<std::uint32_t> co_rank_;  // position of a slot within co_
    std::vector<VertexId> perturbed_;

    std::vector<char> in_mesh_;
    std::vector<HalfedgeId> next_;
    std::vector<HalfedgeId> prev_;
    std::vector<std::uint32_t> degree_;
    std::vector<HalfedgeId> anchor_;
    std::size_t edge_count_ = 0;
};

} // namespace rsr
