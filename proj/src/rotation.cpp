#include "rsr/rotation.hpp"

#include <algorithm>
#include <numeric>

namespace rsr {

RotationSystem::RotationSystem(const Graph& graph, std::span<const Point3> positions,
                               std::span<const UnitNormal> normals)
    : graph_(&graph)
{
    const std::size_t slots = graph.targets.size();
    tail_.resize(slots);
    angle_.resize(slots);
    co_.resize(slots);
    co_rank_.resize(slots);

    for (VertexId u = 0; u < graph.vertex_count(); ++u) {
        const std::uint32_t b = graph.begin(u);
        const std::uint32_t e = graph.end(u);
        if (b == e) {
            continue;
        }
        const Vec3 ref = tangent_reference(normals[u]);
        bool perturbed = false;
        for (std::uint32_t s = b; s < e; ++s) {
            tail_[s] = u;
            try {
                angle_[s] = plane_angle(positions[graph.targets[s]], positions[u], normals[u], ref);
            } catch (const DegenerateProjection&) {
                // Neighbor straight along the normal: park it near the reference.
                angle_[s] = 1e-9 * static_cast<double>(s - b + 1);
                perturbed = true;
            }
        }
        if (perturbed) {
            perturbed_.push_back(u);
        }
        std::iota(co_.begin() + b, co_.begin() + e, b);
        std::sort(co_.begin() + b, co_.begin() + e, [&](HalfedgeId x, HalfedgeId y) {
            return angle_[x] < angle_[y] || (angle_[x] == angle_[y] && graph.targets[x] < graph.targets[y]);
        });
        for (std::uint32_t i = b; i < e; ++i) {
            co_rank_[co_[i]] = i;
        }
    }

    in_mesh_.assign(slots, 0);
    next_.assign(slots, kNoHalfedge);
    prev_.assign(slots, kNoHalfedge);
    degree_.assign(graph.vertex_count(), 0);
    anchor_.assign(graph.vertex_count(), kNoHalfedge);
}

HalfedgeId RotationSystem::halfedge(VertexId u, VertexId v) const
{
    if (u >= vertex_count() || v >= vertex_count()) {
        throw UnknownHalfedge();
    }
    const std::uint32_t s = graph_->find_slot(u, v);
    if (s == Graph::kNoSlot) {
        throw UnknownHalfedge();
    }
    return s;
}

bool RotationSystem::has_edge(VertexId u, VertexId v) const
{
    const std::uint32_t s = graph_->find_slot(u, v);
    return s != Graph::kNoSlot && in_mesh_[s];
}

std::span<const HalfedgeId> RotationSystem::candidate_order(VertexId u) const
{
    return {co_.data() + graph_->begin(u), co_.data() + graph_->end(u)};
}

HalfedgeId RotationSystem::rho(HalfedgeId h) const
{
    if (h >= in_mesh_.size() || !in_mesh_[h]) {
        throw UnknownHalfedge();
    }
    return next_[h];
}

HalfedgeId RotationSystem::rho_inv(HalfedgeId h) const
{
    if (h >= in_mesh_.size() || !in_mesh_[h]) {
        throw UnknownHalfedge();
    }
    return prev_[h];
}

Corner RotationSystem::corner_of(VertexId u, VertexId v) const
{
    const HalfedgeId s = halfedge(u, v);
    if (degree_[u] == 0) {
        throw IsolatedVertex();
    }
    if (degree_[u] == 1) {
        return {anchor_[u], anchor_[u]};
    }
    const std::uint32_t b = graph_->begin(u);
    const std::uint32_t e = graph_->end(u);
    const std::uint32_t r = co_rank_[s];

    HalfedgeId h_prev = kNoHalfedge;
    // Equal angles later in the ordering still count as preceding v.
    for (std::uint32_t i = r + 1; i < e && angle_[co_[i]] == angle_[s]; ++i) {
        if (in_mesh_[co_[i]]) {
            h_prev = co_[i];
        }
    }
    if (h_prev == kNoHalfedge) {
        std::uint32_t i = r;
        do {
            i = (i == b) ? e - 1 : i - 1;
        } while (!in_mesh_[co_[i]]);
        h_prev = co_[i];
    }
    return {h_prev, next_[h_prev]};
}

double RotationSystem::corner_angle(const Corner& c) const
{
    if (c.h_prev == c.h_next) {
        return kTwoPi;
    }
    double d = angle_[c.h_next] - angle_[c.h_prev];
    if (d <= 0.0) {
        d += kTwoPi;
    }
    return d;
}

void RotationSystem::splice(HalfedgeId h, VertexId at, const Corner& c)
{
    in_mesh_[h] = 1;
    if (degree_[at] == 0) {
        next_[h] = h;
        prev_[h] = h;
        anchor_[at] = h;
    } else {
        next_[c.h_prev] = h;
        prev_[h] = c.h_prev;
        next_[h] = c.h_next;
        prev_[c.h_next] = h;
    }
    ++degree_[at];
}

HalfedgeId RotationSystem::insert_edge(VertexId u, VertexId v, const Corner& cu, const Corner& cv)
{
    const HalfedgeId h = halfedge(u, v);
    if (in_mesh_[h]) {
        throw std::invalid_argument("edge is already in the mesh");
    }
    splice(h, u, cu);
    splice(graph_->twins[h], v, cv);
    ++edge_count_;
    return h;
}

HalfedgeId RotationSystem::insert_edge(VertexId u, VertexId v)
{
    const Corner cu = degree_[u] > 0 ? corner_of(u, v) : Corner{};
    const Corner cv = degree_[v] > 0 ? corner_of(v, u) : Corner{};
    return insert_edge(u, v, cu, cv);
}

std::vector<HalfedgeId> RotationSystem::orbit(HalfedgeId h) const
{
    if (h >= in_mesh_.size() || !in_mesh_[h]) {
        throw UnknownHalfedge();
    }
    std::vector<HalfedgeId> out;
    HalfedgeId x = h;
    do {
        out.push_back(x);
        x = face_next(x);
    } while (x != h);
    return out;
}

std::size_t RotationSystem::count_faces() const
{
    std::vector<char> seen(in_mesh_.size(), 0);
    std::size_t faces = 0;
    for (HalfedgeId h = 0; h < in_mesh_.size(); ++h) {
        if (!in_mesh_[h] || seen[h]) {
            continue;
        }
        ++faces;
        HalfedgeId x = h;
        do {
            seen[x] = 1;
            x = face_next(x);
        } while (x != h);
    }
    return faces;
}

} // namespace rsr
