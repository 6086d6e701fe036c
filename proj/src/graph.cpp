#include "rsr/graph.hpp"
#include "rsr/pointcloud.hpp"
#include "rsr/spatial_index.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <tuple>

namespace rsr {

std::uint32_t Graph::find_slot(VertexId u, VertexId v) const
{
    const auto first = targets.begin() + offsets[u];
    const auto last = targets.begin() + offsets[u + 1];
    const auto it = std::lower_bound(first, last, v);
    if (it == last || *it != v) {
        return kNoSlot;
    }
    return static_cast<std::uint32_t>(it - targets.begin());
}

Graph Graph::from_edges(std::size_t vertex_count, std::span<const std::pair<VertexId, VertexId>> edges,
                        std::span<const double> lengths, std::span<const double> euclidean)
{
    struct Directed {
        VertexId from;
        VertexId to;
        double len;
        double euc;
    };
    std::vector<Directed> dir;
    dir.reserve(edges.size() * 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [a, b] = edges[i];
        if (a == b) {
            continue;
        }
        const double e = euclidean.empty() ? lengths[i] : euclidean[i];
        dir.push_back({a, b, lengths[i], e});
        dir.push_back({b, a, lengths[i], e});
    }
    std::sort(dir.begin(), dir.end(), [](const Directed& x, const Directed& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    });
    dir.erase(std::unique(dir.begin(), dir.end(),
                          [](const Directed& x, const Directed& y) { return x.from == y.from && x.to == y.to; }),
              dir.end());

    Graph g;
    g.offsets.assign(vertex_count + 1, 0);
    for (const Directed& d : dir) {
        ++g.offsets[d.from + 1];
    }
    for (std::size_t v = 0; v < vertex_count; ++v) {
        g.offsets[v + 1] += g.offsets[v];
    }
    g.targets.resize(dir.size());
    g.lengths.resize(dir.size());
    double sum = 0.0;
    for (std::size_t s = 0; s < dir.size(); ++s) {
        g.targets[s] = dir[s].to;
        g.lengths[s] = dir[s].len;
        if (dir[s].from < dir[s].to) {
            sum += dir[s].len;
            g.l_max = std::max(g.l_max, dir[s].len);
            g.l_max_euclidean = std::max(g.l_max_euclidean, dir[s].euc);
        }
    }
    g.twins.resize(dir.size());
    for (VertexId u = 0; u < vertex_count; ++u) {
        for (std::uint32_t s = g.begin(u); s < g.end(u); ++s) {
            g.twins[s] = g.find_slot(g.targets[s], u);
        }
    }
    g.mean_length = g.edge_count() > 0 ? sum / static_cast<double>(g.edge_count()) : 0.0;
    g.component = connected_components(g, &g.component_count);
    return g;
}

Graph build_knn_graph(std::span<const Point3> positions, std::span<const UnitNormal> normals, const KdTree& tree,
                      const Params& params)
{
    const std::size_t n = positions.size();
    const double cos_theta = std::cos(params.theta);

    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(n * params.k);
    for (VertexId i = 0; i < n; ++i) {
        for (const Neighbor& nb : tree.knn(positions[i], std::size_t(params.k) + 1)) {
            if (nb.index != i) {
                pairs.emplace_back(std::min(i, nb.index), std::max(i, nb.index));
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    // Normal-consistency filter, then lengths in the chosen metric.
    std::vector<std::pair<VertexId, VertexId>> kept;
    std::vector<double> len;
    std::vector<double> euc;
    kept.reserve(pairs.size());
    double sum = 0.0;
    for (const auto& [u, v] : pairs) {
        if (dot(normals[u].vec(), normals[v].vec()) < cos_theta) {
            continue;
        }
        const double e = distance(positions[u], positions[v]);
        const double l =
            params.noisy ? projection_distance(positions[u], normals[u], positions[v], normals[v]) : e;
        kept.emplace_back(u, v);
        len.push_back(l);
        euc.push_back(e);
        sum += l;
    }

    // Outlier culling against the mean of the survivors.
    if (!kept.empty()) {
        const double limit = params.r * sum / static_cast<double>(kept.size());
        std::size_t w = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (len[i] <= limit) {
                kept[w] = kept[i];
                len[w] = len[i];
                euc[w] = euc[i];
                ++w;
            }
        }
        kept.resize(w);
        len.resize(w);
        euc.resize(w);
    }

    Graph g = Graph::from_edges(n, kept, len, euc);
    g.metric = params.noisy ? EdgeMetric::Projection : EdgeMetric::Euclidean;
    return g;
}

std::vector<std::uint32_t> connected_components(const Graph& g, std::uint32_t* count)
{
    const std::size_t n = g.vertex_count();
    constexpr std::uint32_t unset = 0xffffffffu;
    std::vector<std::uint32_t> label(n, unset);
    std::uint32_t next = 0;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < n; ++s) {
        if (label[s] != unset) {
            continue;
        }
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            for (VertexId w : g.neighbors(v)) {
                if (label[w] == unset) {
                    label[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    if (count) {
        *count = next;
    }
    return label;
}

std::vector<WeightedEdge> minimum_spanning_tree(const Graph& g, VertexId root)
{
    // (length, min, max, vertex to add, parent)
    using Item = std::tuple<double, VertexId, VertexId, VertexId, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<char> in_tree(g.vertex_count(), 0);
    std::vector<WeightedEdge> out;

    const auto visit = [&](VertexId v) {
        in_tree[v] = 1;
        for (std::uint32_t s = g.begin(v); s < g.end(v); ++s) {
            const VertexId w = g.targets[s];
            if (!in_tree[w]) {
                heap.emplace(g.lengths[s], std::min(v, w), std::max(v, w), w, v);
            }
        }
    };
    visit(root);
    while (!heap.empty()) {
        const auto [len, a, b, v, parent] = heap.top();
        heap.pop();
        if (in_tree[v]) {
            continue;
        }
        out.push_back({a, b, len});
        visit(v);
    }
    return out;
}

namespace {

bool edge_less(const WeightedEdge& x, const WeightedEdge& y)
{
    return std::tie(x.length, x.u, x.v) < std::tie(y.length, y.u, y.v);
}

} // namespace

std::vector<WeightedEdge> sort_edges(const Graph& g, std::uint32_t comp)
{
    std::vector<WeightedEdge> out;
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        if (g.component[u] != comp) {
            continue;
        }
        for (std::uint32_t s = g.begin(u); s < g.end(u); ++s) {
            if (u < g.targets[s]) {
                out.push_back({u, g.targets[s], g.lengths[s]});
            }
        }
    }
    std::sort(out.begin(), out.end(), edge_less);
    return out;
}

std::vector<std::vector<WeightedEdge>> sort_edges_by_component(const Graph& g)
{
    std::vector<std::vector<WeightedEdge>> out(g.component_count);
    for (VertexId u = 0; u < g.vertex_count(); ++u) {
        for (std::uint32_t s = g.begin(u); s < g.end(u); ++s) {
            if (u < g.targets[s]) {
                out[g.component[u]].push_back({u, g.targets[s], g.lengths[s]});
            }
        }
    }
    for (auto& list : out) {
        std::sort(list.begin(), list.end(), edge_less);
    }
    return out;
}

} // namespace rsr
