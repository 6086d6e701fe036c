#pragma once

#include "rsr/core.hpp"
#include "rsr/pointcloud.hpp"

#include <span>

namespace rsr {

/// Fibonacci lattice on the unit sphere under a seeded random rotation;
/// normals point outward.
PointCloud sample_sphere(std::size_t n, std::uint64_t seed);

/// Area-uniform rank-1 lattice on a torus around the z axis, with a seeded
/// random shift. Requires major > minor > 0.
PointCloud sample_torus(std::size_t n, double major, double minor, std::uint64_t seed);

/// Two square grids in [0,1]^2 at z = 0 and z = gap, about n points in total.
/// The lower sheet's normals point to -z and the upper sheet's to +z.
PointCloud sample_two_sheets(std::size_t n, double gap);
/// Grid spacing used by sample_two_sheets for the same n.
double two_sheets_spacing(std::size_t n);

enum class NoiseMode { Full, Tangential, Normal };

struct NoiseSpec {
    double amplitude = 0.0;
    NoiseMode mode = NoiseMode::Full;
    std::uint64_t seed = 0;
};

/// Offsets every point by A * e_bar * g * v with g standard normal and v a
/// random unit direction (restricted to the tangent plane or the normal line
/// by the mode). Normals are kept; the noisy positions become the originals.
PointCloud add_position_noise(const PointCloud& cloud, const NoiseSpec& spec, double e_bar);

/// Tilts each normal by an angle uniform in [0, theta] about a random axis
/// perpendicular to it.
PointCloud add_normal_noise(const PointCloud& cloud, double theta_deg, std::uint64_t seed);

/// Moves the selected points by A * e_bar * v.
PointCloud displace_subset(const PointCloud& cloud, std::span<const VertexId> indices, double amplitude,
                           double e_bar, const Vec3& direction);

} // namespace rsr
