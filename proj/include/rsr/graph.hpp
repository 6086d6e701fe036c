#pragma once

#include "rsr/core.hpp"

#include <span>
#include <utility>
#include <vector>

namespace rsr {

class KdTree;

enum class EdgeMetric { Euclidean, Projection };

/// Undirected graph in CSR form. Each undirected edge {u,v} owns two slots,
/// one in each endpoint's neighbor list; neighbor lists are ascending.
struct Graph {
    std::vector<std::uint32_t> offsets; // size vertex_count() + 1
    std::vector<VertexId> targets;      // per slot
    std::vector<double> lengths;        // per slot, in the chosen metric
    std::vector<std::uint32_t> twins;   // slot of the reverse direction

    std::vector<std::uint32_t> component; // per vertex, numbered by lowest member
    std::uint32_t component_count = 0;

    double mean_length = 0.0;     // over surviving edges, chosen metric
    double l_max = 0.0;           // chosen metric
    double l_max_euclidean = 0.0; // same edges, Euclidean length
    EdgeMetric metric = EdgeMetric::Euclidean;

    std::size_t vertex_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t edge_count() const { return targets.size() / 2; }
    std::uint32_t begin(VertexId v) const { return offsets[v]; }
    std::uint32_t end(VertexId v) const { return offsets[v + 1]; }
    std::uint32_t degree(VertexId v) const { return offsets[v + 1] - offsets[v]; }
    std::span<const VertexId> neighbors(VertexId v) const
    {
        return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
    }

    /// Slot of v in u's list, or kNoSlot.
    std::uint32_t find_slot(VertexId u, VertexId v) const;
    bool has_edge(VertexId u, VertexId v) const { return find_slot(u, v) != kNoSlot; }

    static constexpr std::uint32_t kNoSlot = 0xffffffffu;

    /// Builds from an undirected edge list with per-edge lengths. Duplicates
    /// and self-loops are dropped; statistics and components are computed.
    static Graph from_edges(std::size_t vertex_count, std::span<const std::pair<VertexId, VertexId>> edges,
                            std::span<const double> lengths, std::span<const double> euclidean = {});
};

struct WeightedEdge {
    VertexId u = kInvalidVertex; // u < v
    VertexId v = kInvalidVertex;
    double length = 0.0;

    bool operator==(const WeightedEdge&) const = default;
};

/// Symmetrized kNN graph (self excluded) with the normal-consistency filter
/// N_u.N_v >= cos(theta), then edges longer than r times the mean surviving
/// length removed. Lengths use the projection metric when `params.noisy`.
Graph build_knn_graph(std::span<const Point3> positions, std::span<const UnitNormal> normals, const KdTree& tree,
                      const Params& params);

/// Component label per vertex; labels are dense and ordered by lowest member.
std::vector<std::uint32_t> connected_components(const Graph& g, std::uint32_t* count = nullptr);

/// Prim's algorithm from `root` over its component. Ties are broken by
/// (length, min index, max index). Returned edges have u < v.
std::vector<WeightedEdge> minimum_spanning_tree(const Graph& g, VertexId root);

/// All edges of component `comp`, ascending by (length, u, v).
std::vector<WeightedEdge> sort_edges(const Graph& g, std::uint32_t comp);

/// sort_edges for every component in one pass, indexed by component label.
std::vector<std::vector<WeightedEdge>> sort_edges_by_component(const Graph& g);

} // namespace rsr
