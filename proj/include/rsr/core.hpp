#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rsr {

using VertexId = std::uint32_t;
inline constexpr VertexId kInvalidVertex = std::numeric_limits<VertexId>::max();

/// Squared-norm threshold below which a vector is treated as zero.
inline constexpr double kEpsilon = 1e-12;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o)
    {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s)
    {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }
    constexpr bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double squared_norm(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }
inline bool is_finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateProjection : public GeometryError {
public:
    DegenerateProjection() : GeometryError("projected direction is degenerate") {}
};

class DegenerateTriangle : public GeometryError {
public:
    DegenerateTriangle() : GeometryError("triangle has a side of zero length") {}
};

/// A direction of unit Euclidean length (within 1e-6).
class UnitNormal {
public:
    constexpr UnitNormal() = default;

    /// Normalizes `v`. Throws GeometryError for zero or non-finite input.
    explicit UnitNormal(const Vec3& v);

    /// Wraps a vector the caller knows is unit length; no normalization.
    static constexpr UnitNormal from_unit(const Vec3& v)
    {
        UnitNormal n;
        n.v_ = v;
        return n;
    }

    constexpr const Vec3& vec() const { return v_; }
    constexpr operator const Vec3&() const { return v_; }
    constexpr double x() const { return v_.x; }
    constexpr double y() const { return v_.y; }
    constexpr double z() const { return v_.z; }
    constexpr UnitNormal operator-() const { return from_unit(-v_); }
    constexpr bool operator==(const UnitNormal&) const = default;

private:
    Vec3 v_{0.0, 0.0, 1.0};
};

inline constexpr std::uint32_t kUnboundedGenus = std::numeric_limits<std::uint32_t>::max();

/// Run configuration. Angles are radians; the CLI converts from degrees.
struct Params {
    std::uint32_t k = 30;
    double r = 20.0;
    double theta = deg_to_rad(60.0);
    std::uint32_t n = 50;
    std::uint32_t max_genus = kUnboundedGenus;
    bool noisy = false;
    double quality_min = deg_to_rad(5.0);
    double quality_max = deg_to_rad(175.0);
    std::uint32_t smoothing_iterations = 1;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Primitives

/// Orthogonal projection of `p` into the plane through `origin` with `normal`.
Point3 project_to_plane(const Point3& p, const Point3& origin, const UnitNormal& normal);

/// Counterclockwise angle about `normal`, in [0, 2π), from `reference` to the
/// direction of `p` projected into the plane at `origin`.
/// Throws DegenerateProjection when the projected direction vanishes.
double plane_angle(const Point3& p, const Point3& origin, const UnitNormal& normal, const Vec3& reference);

/// A 2D segment whose endpoints may carry vertex ids. Segments sharing a
/// vertex id are adjacent, not crossing, unless they overlap collinearly.
struct Segment2 {
    Vec2 a;
    Vec2 b;
    VertexId ia = kInvalidVertex;
    VertexId ib = kInvalidVertex;
};

bool segments_intersect_2d(const Segment2& s, const Segment2& t);

/// Interior angles at p0, p1, p2. Throws DegenerateTriangle for a side < 1e-12.
std::array<double, 3> triangle_angles(const Point3& p0, const Point3& p1, const Point3& p2);

/// Unit vector orthogonal to `n`, taken from the global axis least aligned with it.
Vec3 tangent_reference(const UnitNormal& n);

} // namespace rsr
