#include "rsr/spatial_index.hpp"

#include <algorithm>
#include <queue>

namespace rsr {

namespace {

double box_distance_sq(const Point3& q, const Point3& lo, const Point3& hi)
{
    double d = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double c = q[a];
        double t = 0.0;
        if (c < lo[a]) {
            t = lo[a] - c;
        } else if (c > hi[a]) {
            t = c - hi[a];
        }
        d += t * t;
    }
    return d;
}

double coord(const Point3& p, int axis)
{
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

struct Candidate {
    double d2;
    VertexId index;
    bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

} // namespace

KdTree::KdTree(std::span<const Point3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(1, leaf_size))
{
    if (points_.empty()) {
        throw EmptyInput();
    }
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) {
        order_[i] = static_cast<VertexId>(i);
    }
    nodes_.reserve(2 * (points_.size() / leaf_size_ + 1));
    build(0, static_cast<std::uint32_t>(order_.size()), 1);
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t depth)
{
    depth_ = std::max(depth_, depth);
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    Point3 lo = points_[order_[begin]];
    Point3 hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        const Point3& p = points_[order_[i]];
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    nodes_[id].begin = begin;
    nodes_[id].end = end;

    const Vec3 ext = hi - lo;
    if (end - begin <= leaf_size_ || (ext.x <= 0.0 && ext.y <= 0.0 && ext.z <= 0.0)) {
        return id;
    }
    int axis = 0;
    if (ext.y > ext[axis]) {
        axis = 1;
    }
    if (ext.z > ext[axis]) {
        axis = 2;
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](VertexId a, VertexId b) { return coord(points_[a], axis) < coord(points_[b], axis); });

    const std::uint32_t left = build(begin, mid, depth + 1);
    const std::uint32_t right = build(mid, end, depth + 1);
    Node& node = nodes_[id];
    node.axis = axis;
    node.split = coord(points_[order_[mid]], axis);
    node.left = left;
    node.right = right;
    return id;
}

std::vector<Neighbor> KdTree::knn(const Point3& q, std::size_t k) const
{
    std::vector<Neighbor> out;
    k = std::min(k, points_.size());
    if (k == 0) {
        return out;
    }
    std::priority_queue<Candidate> best; // max-heap on (d2, index)
    std::vector<std::uint32_t> stack{0};
    stack.reserve(64);

    const auto worse_than_all = [&](double box_d2) { return best.size() == k && box_d2 > best.top().d2; };

    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (worse_than_all(box_distance_sq(q, node.lo, node.hi))) {
            continue;
        }
        if (node.axis < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const VertexId idx = order_[i];
                const Candidate c{squared_norm(points_[idx] - q), idx};
                if (best.size() < k) {
                    best.push(c);
                } else if (c < best.top()) {
                    best.pop();
                    best.push(c);
                }
            }
            continue;
        }
        // Push the far child first so the near one is visited next.
        const bool go_left = coord(q, node.axis) < node.split;
        stack.push_back(go_left ? node.right : node.left);
        stack.push_back(go_left ? node.left : node.right);
    }

    out.resize(best.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = {best.top().index, std::sqrt(best.top().d2)};
        best.pop();
    }
    return out;
}

void KdTree::radius_query(const Point3& c, double rad, std::vector<VertexId>& out) const
{
    if (rad < 0.0) {
        return;
    }
    const double r2 = rad * rad;
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (box_distance_sq(c, node.lo, node.hi) > r2) {
            continue;
        }
        if (node.axis < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const VertexId idx = order_[i];
                if (squared_norm(points_[idx] - c) <= r2) {
                    out.push_back(idx);
                }
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
}

std::vector<VertexId> KdTree::radius_query(const Point3& c, double rad) const
{
    std::vector<VertexId> out;
    radius_query(c, rad, out);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace rsr
