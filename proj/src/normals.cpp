#include "rsr/pointcloud.hpp"
#include "rsr/spatial_index.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <queue>
#include <tuple>

namespace rsr {

namespace {

struct Fit {
    Vec3 normal;
    bool degenerate = false;
};

Vec3 to_vec(const Eigen::Vector3d& v)
{
    return {v.x(), v.y(), v.z()};
}

Fit fit_plane(std::span<const Point3> positions, const std::vector<Neighbor>& hood)
{
    Point3 c{};
    for (const Neighbor& nb : hood) {
        c += positions[nb.index];
    }
    c = c / static_cast<double>(hood.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Neighbor& nb : hood) {
        const Vec3 d = positions[nb.index] - c;
        const Eigen::Vector3d e(d.x, d.y, d.z);
        cov += e * e.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Eigen::Vector3d ev = solver.eigenvalues(); // ascending
    const double top = ev(2);
    if (!(top > kEpsilon)) {
        return {{0.0, 0.0, 1.0}, true};
    }
    if (ev(1) <= 1e-10 * top) {
        // Collinear neighborhood: any direction orthogonal to the line.
        const UnitNormal dominant(to_vec(solver.eigenvectors().col(2)));
        return {tangent_reference(dominant), true};
    }
    return {to_vec(solver.eigenvectors().col(0)), false};
}

// Flips normals so they agree along a minimum spanning tree of the
// neighborhood graph under cost 1 - |Ni.Nj|.
void orient(std::span<const Point3> positions, const std::vector<std::vector<VertexId>>& adj,
            std::vector<Vec3>& normals)
{
    const std::size_t n = positions.size();
    std::vector<int> comp(n, -1);
    std::vector<VertexId> seeds;
    for (VertexId s = 0; s < n; ++s) {
        if (comp[s] >= 0) {
            continue;
        }
        const int id = static_cast<int>(seeds.size());
        VertexId best = s;
        std::vector<VertexId> stack{s};
        comp[s] = id;
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            if (positions[v].z > positions[best].z || (positions[v].z == positions[best].z && v < best)) {
                best = v;
            }
            for (VertexId w : adj[v]) {
                if (comp[w] < 0) {
                    comp[w] = id;
                    stack.push_back(w);
                }
            }
        }
        seeds.push_back(best);
    }

    using Item = std::tuple<double, VertexId, VertexId>; // cost, vertex, parent
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<char> done(n, 0);
    for (VertexId seed : seeds) {
        if (normals[seed].z < 0.0) {
            normals[seed] = -normals[seed];
        }
        heap.emplace(0.0, seed, seed);
        while (!heap.empty()) {
            const auto [cost, v, parent] = heap.top();
            heap.pop();
            if (done[v]) {
                continue;
            }
            done[v] = 1;
            if (v != parent && dot(normals[parent], normals[v]) < 0.0) {
                normals[v] = -normals[v];
            }
            for (VertexId w : adj[v]) {
                if (!done[w]) {
                    heap.emplace(1.0 - std::abs(dot(normals[v], normals[w])), w, v);
                }
            }
        }
    }
}

} // namespace

NormalEstimate estimate_normals(std::span<const Point3> positions, const KdTree& tree, std::uint32_t k)
{
    const std::size_t n = positions.size();
    NormalEstimate out;
    std::vector<Vec3> raw(n);
    std::vector<std::vector<VertexId>> adj(n);
    for (VertexId i = 0; i < n; ++i) {
        const auto hood = tree.knn(positions[i], std::size_t(k) + 1);
        const Fit fit = fit_plane(positions, hood);
        raw[i] = fit.normal;
        if (fit.degenerate) {
            out.degenerate.push_back(i);
        }
        for (const Neighbor& nb : hood) {
            if (nb.index != i) {
                adj[i].push_back(nb.index);
                adj[nb.index].push_back(i);
            }
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    orient(positions, adj, raw);
    out.normals.reserve(n);
    for (const Vec3& v : raw) {
        out.normals.emplace_back(v);
    }
    return out;
}

NormalEstimate estimate_normals(std::span<const Point3> positions, std::uint32_t k)
{
    const KdTree tree(positions);
    return estimate_normals(positions, tree, k);
}

std::vector<Point3> smooth_project(std::span<const Point3> positions, std::span<const UnitNormal> normals,
                                   const KdTree& tree, std::uint32_t k, double theta)
{
    const double cos_theta = std::cos(theta);
    std::vector<Point3> out(positions.size());
    for (VertexId i = 0; i < positions.size(); ++i) {
        const Vec3& ni = normals[i].vec();
        Point3 c{};
        Vec3 m{};
        std::size_t count = 0;
        for (const Neighbor& nb : tree.knn(positions[i], std::size_t(k) + 1)) {
            const Vec3& nj = normals[nb.index].vec();
            if (dot(ni, nj) < cos_theta) {
                continue;
            }
            c += positions[nb.index];
            m += nj;
            ++count;
        }
        // The point itself always passes, so count >= 1.
        c = c / static_cast<double>(count);
        const double len = norm(m);
        const Vec3 plane_n = len > 1e-9 ? m / len : ni;
        out[i] = positions[i] - plane_n * dot(positions[i] - c, plane_n);
    }
    return out;
}

double projection_distance(const Point3& pu, const UnitNormal& nu, const Point3& pv, const UnitNormal& nv)
{
    const Vec3 e = pv - pu;
    const double e2 = squared_norm(e);
    const auto tangential = [&](const UnitNormal& n) {
        const double a = dot(e, n.vec());
        return std::sqrt(std::max(0.0, e2 - a * a));
    };
    return 0.5 * (tangential(nu) + tangential(nv));
}

} // namespace rsr
