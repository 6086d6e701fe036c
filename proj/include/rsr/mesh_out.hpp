#pragma once

#include "rsr/core.hpp"
#include "rsr/rotation.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rsr {

using Triangle = std::array<VertexId, 3>;

struct TriangleMesh {
    std::vector<Point3> vertices;
    std::vector<UnitNormal> normals; // empty or one per vertex
    std::vector<Triangle> triangles; // counterclockwise about the outward normal
    std::vector<std::size_t> hole_sizes; // faces left with more than three sides
};

/// One triangle per τ-orbit of size 3, reversed so it winds counterclockwise
/// about the vertex normals. Larger orbits are recorded as holes.
TriangleMesh extract_triangles(const RotationSystem& rs, std::span<const Point3> positions,
                               std::span<const UnitNormal> normals = {});

struct ComponentMetrics {
    std::int64_t chi = 0;
    std::int64_t genus = 0;
    std::size_t boundary_loops = 0;
    std::size_t triangles = 0;
    std::size_t vertices = 0;
    std::size_t edges = 0;
};

struct StageTimes {
    double init = 0.0;
    double insertion = 0.0;
    double handles = 0.0;
    double triangulation = 0.0;
};

struct Metrics {
    std::size_t input_vertices = 0;
    std::size_t referenced_vertices = 0;
    double r_v = 0.0;
    std::size_t boundary_edges = 0; // undirected edges with exactly one triangle
    std::size_t edges = 0;
    std::size_t holes = 0;
    std::vector<ComponentMetrics> components; // joined through shared edges, by lowest vertex
    StageTimes timings_ms;
};

Metrics compute_metrics(const TriangleMesh& mesh, std::size_t input_vertices);

/// JSON text with the pinned key set. `with_timings` false writes zeros, for
/// byte-comparable output.
std::string metrics_to_json(const Metrics& m, bool with_timings = true);

enum class MeshFormat { Obj, Ply };

MeshFormat mesh_format_from_path(const std::filesystem::path& path);
void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);
void export_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);

/// Reads vertices and triangular faces back from an OBJ or ASCII PLY written by export_mesh.
TriangleMesh load_mesh(const std::filesystem::path& path);

/// Interior edges whose two triangles traverse them in the same direction,
/// plus edges with more than two triangles.
std::size_t orientation_defects(std::span<const Triangle> triangles);

} // namespace rsr
