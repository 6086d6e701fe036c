#include "rsr/reconstruct.hpp"
#include "rsr/spatial_index.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>

namespace rsr {

namespace {

constexpr std::uint32_t kNoLabel = 0xffffffffu;

class StopWatch {
public:
    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::uint32_t find_label(std::vector<std::uint32_t>& parent, std::uint32_t x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

} // namespace

bool Reconstructor::Ear::operator>(const Ear& o) const
{
    return std::tie(length, a, b, h1) > std::tie(o.length, o.a, o.b, o.h1);
}

Reconstructor::Reconstructor(const Graph& graph, std::span<const Point3> positions,
                             std::span<const UnitNormal> normals, const KdTree& tree, const Params& params)
    : graph_(graph),
      positions_(positions),
      normals_(normals),
      tree_(tree),
      params_(params),
      rs_(graph, positions, normals),
      faces_(graph.targets.size(), params.seed)
{
    const StopWatch sw;
    components_.resize(graph.component_count);
    for (std::uint32_t c = 0; c < graph.component_count; ++c) {
        components_[c].id = c;
    }
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        ComponentState& cs = components_[graph.component[v]];
        if (cs.root == kInvalidVertex) {
            cs.root = v;
        }
        ++cs.vertex_count;
    }
    queues_ = sort_edges_by_component(graph);
    for (std::uint32_t c = 0; c < graph.component_count; ++c) {
        components_[c].queue_size = queues_[c].size();
    }
    face_label_.assign(graph.targets.size(), kNoLabel);
    mark_.assign(graph.vertex_count(), 0);
    hop_mark_.assign(graph.vertex_count(), 0);
    hop_dist_.assign(graph.vertex_count(), 0);
    init_ms_ += sw.elapsed_ms();
}

void Reconstructor::notify(std::uint32_t comp, VertexId u, VertexId v, InsertionKind kind)
{
    if (observer_) {
        observer_(rs_, InsertionEvent{comp, u, v, kind});
    }
}

void Reconstructor::run()
{
    {
        const StopWatch sw;
        for (const ComponentState& c : components_) {
            if (c.vertex_count >= 2) {
                init_component(c.id);
            }
        }
        init_ms_ += sw.elapsed_ms();
    }
    {
        const StopWatch sw;
        for (const ComponentState& c : components_) {
            if (c.vertex_count >= 2) {
                edge_insertion_stage(c.id);
            }
        }
        insertion_ms_ += sw.elapsed_ms();
    }
    if (params_.max_genus > 0) {
        const StopWatch sw;
        for (const ComponentState& c : components_) {
            if (c.vertex_count >= 2) {
                const auto candidates = find_handle_candidates(c.id);
                connect_handles(c.id, candidates);
            }
        }
        handles_ms_ += sw.elapsed_ms();
    }
    {
        const StopWatch sw;
        triangulate();
        triangulation_ms_ += sw.elapsed_ms();
    }
    spdlog::debug("rejections: topology {}, geometry {}, degenerate plane {}, quality {}", rejections_.topology,
                  rejections_.geometry, rejections_.degenerate_plane, rejections_.quality);
}

void Reconstructor::init_component(std::uint32_t comp)
{
    const ComponentState& cs = components_[comp];
    for (const WeightedEdge& e : minimum_spanning_tree(graph_, cs.root)) {
        rs_.insert_edge(e.u, e.v);
    }
    faces_.add_face(rs_.orbit(rs_.any_halfedge(cs.root)));
    notify(comp, cs.root, cs.root, InsertionKind::Tree);
}

bool Reconstructor::topology_ok(const Corner& cu, const Corner& cv) const
{
    const HalfedgeId r = faces_.root(cu.h_next);
    return faces_.root(rs_.iota(cu.h_prev)) == r && faces_.root(cv.h_next) == r &&
           faces_.root(rs_.iota(cv.h_prev)) == r;
}

bool Reconstructor::topology_test(VertexId u, VertexId v) const
{
    if (rs_.mesh_degree(u) == 0 || rs_.mesh_degree(v) == 0 || rs_.has_edge(u, v)) {
        return false;
    }
    return topology_ok(rs_.corner_of(u, v), rs_.corner_of(v, u));
}

bool Reconstructor::geometry_test(VertexId u, VertexId v)
{
    const Vec3 sum = normals_[u].vec() + normals_[v].vec();
    const double len = norm(sum);
    if (len < 1e-6) {
        ++rejections_.degenerate_plane;
        return false;
    }
    const UnitNormal n = UnitNormal::from_unit(sum / len);
    const Vec3 e1 = tangent_reference(n);
    const Vec3 e2 = cross(n.vec(), e1);
    const Point3& pu = positions_[u];
    const Point3& pv = positions_[v];
    const Point3 mid = (pu + pv) * 0.5;
    const auto flat = [&](const Point3& p) {
        const Vec3 d = p - mid;
        return Vec2{dot(d, e1), dot(d, e2)};
    };

    ball_.clear();
    tree_.radius_query(mid, 0.5 * distance(pu, pv) + graph_.l_max_euclidean, ball_);
    if (++epoch_ == 0) {
        std::fill(mark_.begin(), mark_.end(), 0);
        epoch_ = 1;
    }
    for (VertexId w : ball_) {
        mark_[w] = epoch_;
    }

    const Segment2 cand{flat(pu), flat(pv), u, v};
    const std::uint32_t comp = graph_.component[u];
    for (VertexId w : ball_) {
        const HalfedgeId h0 = rs_.any_halfedge(w);
        // Each component is meshed on its own; other components never obstruct.
        if (h0 == kNoHalfedge || graph_.component[w] != comp) {
            continue;
        }
        const Vec2 pw = flat(positions_[w]);
        HalfedgeId h = h0;
        do {
            const VertexId x = rs_.head(h);
            // Edges with both ends in the ball are seen from the lower end only.
            if (mark_[x] != epoch_ || w < x) {
                if (segments_intersect_2d(cand, Segment2{pw, flat(positions_[x]), w, x})) {
                    return false;
                }
            }
            h = rs_.next(h);
        } while (h != h0);
    }
    return true;
}

bool Reconstructor::quality_ok(VertexId u, VertexId v, const Corner& cu, const Corner& cv) const
{
    const auto [size_a, size_b] = faces_.split_sizes(cu, cv);
    const auto good = [&](VertexId apex) {
        try {
            const auto angles = triangle_angles(positions_[u], positions_[v], positions_[apex]);
            return std::all_of(angles.begin(), angles.end(),
                               [&](double a) { return a >= params_.quality_min && a <= params_.quality_max; });
        } catch (const DegenerateTriangle&) {
            return false;
        }
    };
    if (size_a == 3 && !good(rs_.head(cv.h_next))) {
        return false;
    }
    if (size_b == 3 && !good(rs_.head(cu.h_next))) {
        return false;
    }
    return true;
}

bool Reconstructor::quality_test(VertexId u, VertexId v) const
{
    return quality_ok(u, v, rs_.corner_of(u, v), rs_.corner_of(v, u));
}

void Reconstructor::edge_insertion_stage(std::uint32_t comp)
{
    ComponentState& cs = components_[comp];
    const auto& queue = queues_[comp];
    std::size_t limit = queue.size();
    if (params_.max_genus > 0) {
        limit = (2 * queue.size() + 2) / 3;
    }
    cs.queue_processed = limit;
    for (std::size_t i = 0; i < limit; ++i) {
        const auto [u, v, len] = queue[i];
        if (rs_.has_edge(u, v)) {
            continue;
        }
        const Corner cu = rs_.corner_of(u, v);
        const Corner cv = rs_.corner_of(v, u);
        if (!topology_ok(cu, cv)) {
            ++rejections_.topology;
            continue;
        }
        if (!geometry_test(u, v)) {
            ++rejections_.geometry;
            continue;
        }
        if (!quality_ok(u, v, cu, cv)) {
            ++rejections_.quality;
            continue;
        }
        const HalfedgeId h = rs_.insert_edge(u, v, cu, cv);
        faces_.split_on_insert(rs_, h, cu, cv);
        ++cs.inserted;
        notify(comp, u, v, InsertionKind::Edge);
    }
}

std::vector<WeightedEdge> Reconstructor::find_handle_candidates(std::uint32_t comp)
{
    // Freeze face identities as labels before the first handle invalidates them.
    std::unordered_map<HalfedgeId, std::uint32_t> root_label;
    for (const WeightedEdge& e : queues_[comp]) {
        for (const VertexId w : {e.u, e.v}) {
            const HalfedgeId h0 = rs_.any_halfedge(w);
            if (h0 == kNoHalfedge || face_label_[h0] != kNoLabel) {
                continue;
            }
            HalfedgeId h = h0;
            do {
                const HalfedgeId r = faces_.root(h);
                auto [it, fresh] = root_label.try_emplace(r, static_cast<std::uint32_t>(label_parent_.size()));
                if (fresh) {
                    label_parent_.push_back(it->second);
                }
                face_label_[h] = it->second;
                h = rs_.next(h);
            } while (h != h0);
        }
    }

    std::vector<WeightedEdge> out;
    for (const WeightedEdge& e : queues_[comp]) {
        if (rs_.has_edge(e.u, e.v)) {
            continue;
        }
        const Corner cu = rs_.corner_of(e.u, e.v);
        const Corner cv = rs_.corner_of(e.v, e.u);
        if (face_label_[cu.h_next] == face_label_[cv.h_next]) {
            continue;
        }
        if (rs_.corner_angle(cu) <= kPi || rs_.corner_angle(cv) <= kPi) {
            continue;
        }
        if (!geometry_test(e.u, e.v)) {
            continue;
        }
        out.push_back(e);
    }
    return out;
}

std::optional<std::uint32_t> Reconstructor::hop_distance_capped(VertexId u, VertexId v, std::uint32_t cap)
{
    if (u == v) {
        return 0;
    }
    if (++hop_epoch_ == 0) {
        std::fill(hop_mark_.begin(), hop_mark_.end(), 0);
        hop_epoch_ = 1;
    }
    std::vector<VertexId> frontier{u};
    std::vector<VertexId> next;
    hop_mark_[u] = hop_epoch_;
    for (std::uint32_t d = 1; d <= cap && !frontier.empty(); ++d) {
        next.clear();
        for (VertexId x : frontier) {
            const HalfedgeId h0 = rs_.any_halfedge(x);
            if (h0 == kNoHalfedge) {
                continue;
            }
            HalfedgeId h = h0;
            do {
                const VertexId y = rs_.head(h);
                if (y == v) {
                    return d;
                }
                if (hop_mark_[y] != hop_epoch_) {
                    hop_mark_[y] = hop_epoch_;
                    next.push_back(y);
                }
                h = rs_.next(h);
            } while (h != h0);
        }
        frontier.swap(next);
    }
    return std::nullopt;
}

std::size_t Reconstructor::connect_handles(std::uint32_t comp, std::span<const WeightedEdge> candidates)
{
    ComponentState& cs = components_[comp];
    std::size_t added = 0;
    for (const WeightedEdge& e : candidates) {
        if (cs.genus >= params_.max_genus) {
            break;
        }
        if (rs_.has_edge(e.u, e.v)) {
            continue;
        }
        const Corner cu = rs_.corner_of(e.u, e.v);
        const Corner cv = rs_.corner_of(e.v, e.u);
        const std::uint32_t la = find_label(label_parent_, face_label_[cu.h_next]);
        const std::uint32_t lb = find_label(label_parent_, face_label_[cv.h_next]);
        if (la == lb) {
            continue;
        }
        if (rs_.corner_angle(cu) <= kPi || rs_.corner_angle(cv) <= kPi) {
            continue;
        }
        if (!geometry_test(e.u, e.v)) {
            continue;
        }
        if (hop_distance_capped(e.u, e.v, params_.n).has_value()) {
            continue;
        }
        const HalfedgeId h = rs_.insert_edge(e.u, e.v, cu, cv);
        label_parent_[lb] = la;
        face_label_[h] = la;
        face_label_[rs_.iota(h)] = la;
        ++cs.genus;
        cs.handles.emplace_back(e.u, e.v);
        handle_vertices_.push_back(e.u);
        handle_vertices_.push_back(e.v);
        ++added;
        notify(comp, e.u, e.v, InsertionKind::Handle);
    }
    return added;
}

void Reconstructor::explore(VertexId x)
{
    const HalfedgeId h0 = rs_.any_halfedge(x);
    if (h0 == kNoHalfedge) {
        return;
    }
    HalfedgeId h1 = h0;
    do {
        const HalfedgeId h2 = rs_.next(h1);
        if (h2 != h1) {
            const VertexId a = rs_.head(h1);
            const VertexId b = rs_.head(h2);
            const std::uint32_t s = graph_.find_slot(a, b);
            if (s != Graph::kNoSlot && !rs_.in_mesh(s)) {
                ears_.push_back({graph_.lengths[s], a, b, h1, h2});
                std::push_heap(ears_.begin(), ears_.end(), std::greater<>{});
            }
        }
        h1 = h2;
    } while (h1 != h0);
}

std::size_t Reconstructor::triangulate()
{
    std::vector<char> visited(graph_.vertex_count(), 0);
    std::size_t added = 0;

    const auto visit = [&](VertexId x) {
        visited[x] = 1;
        explore(x);
    };
    const auto drain = [&]() {
        while (!ears_.empty()) {
            std::pop_heap(ears_.begin(), ears_.end(), std::greater<>{});
            const Ear ear = ears_.back();
            ears_.pop_back();
            // The corner at the ear tip must still be intact.
            if (rs_.next(ear.h1) != ear.h2 || rs_.has_edge(ear.a, ear.b)) {
                continue;
            }
            const Corner ca = rs_.corner_of(ear.a, ear.b);
            const Corner cb = rs_.corner_of(ear.b, ear.a);
            if (ca.h_next != rs_.iota(ear.h1) || cb.h_prev != rs_.iota(ear.h2)) {
                continue;
            }
            if (rs_.corner_angle(Corner{ear.h1, ear.h2}) >= kPi) {
                continue;
            }
            if (!geometry_test(ear.a, ear.b)) {
                continue;
            }
            rs_.insert_edge(ear.a, ear.b, ca, cb);
            ++added;
            notify(graph_.component[ear.a], ear.a, ear.b, InsertionKind::Triangulation);
            visit(ear.a);
            visit(ear.b);
        }
    };

    for (VertexId x : handle_vertices_) {
        visit(x);
    }
    drain();
    for (VertexId x = 0; x < graph_.vertex_count(); ++x) {
        if (!visited[x]) {
            visit(x);
            drain();
        }
    }
    return added;
}

} // namespace rsr
