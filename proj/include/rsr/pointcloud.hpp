#pragma once

#include "rsr/core.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsr {

class KdTree;

struct PointCloud {
    std::vector<Point3> positions;
    std::vector<UnitNormal> normals; // empty when absent
    std::vector<Point3> original_positions;

    std::size_t size() const { return positions.size(); }
    bool has_normals() const { return !normals.empty(); }

    /// Builds a cloud whose original positions equal `positions`.
    static PointCloud from_positions(std::vector<Point3> positions, std::vector<UnitNormal> normals = {});
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class UnsupportedFormat : public std::invalid_argument {
public:
    explicit UnsupportedFormat(const std::string& what) : std::invalid_argument(what) {}
};

enum class CloudFormat { Ply, Obj, Xyz };

/// Picks the format from the file extension (case-insensitive).
CloudFormat format_from_path(const std::filesystem::path& path);

PointCloud load_cloud(const std::filesystem::path& path);
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);

/// Writes positions (and normals when present). PLY output is ASCII.
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);

/// Shortest decimal text that reads back to the same double.
void append_number(std::string& out, double v);

struct NormalEstimate {
    std::vector<UnitNormal> normals;
    // Vertices whose neighborhood covariance had rank <= 1.
    std::vector<VertexId> degenerate;
};

/// PCA normals over the k-neighborhood (self included), then oriented by
/// propagation along a minimum spanning tree of the neighborhood graph with
/// cost 1 - |Ni.Nj|. Each component is seeded at its highest-z vertex with a
/// normal pointing to +z.
NormalEstimate estimate_normals(std::span<const Point3> positions, std::uint32_t k);
NormalEstimate estimate_normals(std::span<const Point3> positions, const KdTree& tree, std::uint32_t k);

/// Moves every point onto the plane through the centroid of its k-neighborhood
/// whose normal is the normalized mean of the neighborhood normals. Neighbors
/// whose normal differs from the point's own by more than `theta` are ignored.
/// Returns the projected positions; the input is untouched.
std::vector<Point3> smooth_project(std::span<const Point3> positions, std::span<const UnitNormal> normals,
                                   const KdTree& tree, std::uint32_t k, double theta);

/// Mean of the lengths of the edge vector projected into each endpoint's tangent plane.
double projection_distance(const Point3& pu, const UnitNormal& nu, const Point3& pv, const UnitNormal& nv);

} // namespace rsr
