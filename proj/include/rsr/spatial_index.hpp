#pragma once

#include "rsr/core.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace rsr {

class EmptyInput : public std::invalid_argument {
public:
    EmptyInput() : std::invalid_argument("cannot index an empty point set") {}
};

struct Neighbor {
    VertexId index = kInvalidVertex;
    double distance = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// Static kd-tree over 3D points. Splits at the median of the widest axis.
/// Immutable after construction; queries are const and thread-safe.
class KdTree {
public:
    explicit KdTree(std::span<const Point3> points, std::size_t leaf_size = 12);

    /// min(k, size()) nearest points, ascending by distance then by index.
    std::vector<Neighbor> knn(const Point3& q, std::size_t k) const;

    /// Every index with ‖p − c‖ ≤ rad, ascending by index.
    std::vector<VertexId> radius_query(const Point3& c, double rad) const;

    /// Appends to `out` without sorting; for hot loops that reuse a buffer.
    void radius_query(const Point3& c, double rad, std::vector<VertexId>& out) const;

    std::size_t size() const { return points_.size(); }
    std::size_t depth() const { return depth_; }
    const Point3& point(VertexId i) const { return points_[i]; }

    /// Leaf index ranges in tree order; every input index appears exactly once.
    std::span<const VertexId> permutation() const { return order_; }

private:
    struct Node {
        // Leaves have axis == -1 and cover order_[begin, end).
        int axis = -1;
        double split = 0.0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        Point3 lo;
        Point3 hi;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::size_t depth);

    std::vector<Point3> points_;
    std::vector<VertexId> order_;
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
    std::size_t depth_ = 0;
};

} // namespace rsr
