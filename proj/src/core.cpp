#include "rsr/core.hpp"

#include <algorithm>

namespace rsr {

UnitNormal::UnitNormal(const Vec3& v)
{
    const double sq = squared_norm(v);
    if (!(sq > kEpsilon) || !std::isfinite(sq)) {
        throw GeometryError("cannot normalize a zero or non-finite vector");
    }
    v_ = v / std::sqrt(sq);
}

void Params::validate() const
{
    if (k < 2) {
        throw std::invalid_argument("k must be at least 2");
    }
    if (!(r > 0.0)) {
        throw std::invalid_argument("r must be positive");
    }
    if (!(theta > 0.0) || theta > kPi + 1e-12) {
        throw std::invalid_argument("theta must lie in (0, 180] degrees");
    }
    if (!(quality_min < quality_max)) {
        throw std::invalid_argument("quality minimum angle must be below the maximum");
    }
    if (smoothing_iterations < 1) {
        throw std::invalid_argument("smoothing iterations must be at least 1");
    }
}

Point3 project_to_plane(const Point3& p, const Point3& origin, const UnitNormal& normal)
{
    const Vec3& n = normal.vec();
    return p - n * dot(p - origin, n);
}

double plane_angle(const Point3& p, const Point3& origin, const UnitNormal& normal, const Vec3& reference)
{
    const Vec3& n = normal.vec();
    const Vec3 d = p - origin;
    const Vec3 proj = d - n * dot(d, n);
    if (squared_norm(proj) < kEpsilon * kEpsilon) {
        throw DegenerateProjection();
    }
    // Right-handed frame (reference, n x reference) in the tangent plane.
    const Vec3 ortho = cross(n, reference);
    double a = std::atan2(dot(proj, ortho), dot(proj, reference));
    if (a < 0.0) {
        a += kTwoPi;
    }
    if (a >= kTwoPi) {
        a = 0.0;
    }
    return a;
}

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return cross(b - a, c - a);
}

// Orientation with a tolerance relative to the lengths involved.
int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const double o = orient(a, b, c);
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double scale = std::sqrt(dot(ab, ab) * dot(ac, ac));
    if (std::abs(o) <= 1e-12 * scale) {
        return 0;
    }
    return o > 0.0 ? 1 : -1;
}

// c is known collinear with a-b; test whether it lies within the closed box.
bool on_segment(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
}

bool closed_segments_intersect(const Segment2& s, const Segment2& t)
{
    const int o1 = orient_sign(s.a, s.b, t.a);
    const int o2 = orient_sign(s.a, s.b, t.b);
    const int o3 = orient_sign(t.a, t.b, s.a);
    const int o4 = orient_sign(t.a, t.b, s.b);

    if (o1 * o2 < 0 && o3 * o4 < 0) {
        return true;
    }
    if (o1 == 0 && on_segment(s.a, s.b, t.a)) {
        return true;
    }
    if (o2 == 0 && on_segment(s.a, s.b, t.b)) {
        return true;
    }
    if (o3 == 0 && on_segment(t.a, t.b, s.a)) {
        return true;
    }
    if (o4 == 0 && on_segment(t.a, t.b, s.b)) {
        return true;
    }
    return false;
}

} // namespace

bool segments_intersect_2d(const Segment2& s, const Segment2& t)
{
    const auto valid = [](VertexId v) { return v != kInvalidVertex; };
    const bool aa = valid(s.ia) && s.ia == t.ia;
    const bool ab = valid(s.ia) && s.ia == t.ib;
    const bool ba = valid(s.ib) && s.ib == t.ia;
    const bool bb = valid(s.ib) && s.ib == t.ib;
    const int shared = int(aa) + int(ab) + int(ba) + int(bb);

    if (shared >= 2) {
        return true; // same edge
    }
    if (shared == 1) {
        // Only a collinear overlap beyond the common vertex counts.
        const Vec2 common = (aa || ab) ? s.a : s.b;
        const Vec2 p = ((aa || ab) ? s.b : s.a) - common;
        const Vec2 q = ((aa || ba) ? t.b : t.a) - common;
        const double scale = std::sqrt(dot(p, p) * dot(q, q));
        if (scale <= 0.0) {
            return false;
        }
        return std::abs(cross(p, q)) <= 1e-12 * scale && dot(p, q) > 0.0;
    }
    return closed_segments_intersect(s, t);
}

std::array<double, 3> triangle_angles(const Point3& p0, const Point3& p1, const Point3& p2)
{
    const double a = distance(p1, p2); // opposite p0
    const double b = distance(p0, p2); // opposite p1
    const double c = distance(p0, p1); // opposite p2
    if (a < kEpsilon || b < kEpsilon || c < kEpsilon) {
        throw DegenerateTriangle();
    }
    const auto angle_at = [](const Point3& apex, const Point3& q, const Point3& r) {
        const Vec3 u = q - apex;
        const Vec3 v = r - apex;
        return std::atan2(norm(cross(u, v)), dot(u, v));
    };
    const double a0 = angle_at(p0, p1, p2);
    const double a1 = angle_at(p1, p2, p0);
    // The third angle closes the sum exactly; atan2 keeps the first two accurate.
    const double a2 = std::max(0.0, kPi - a0 - a1);
    return {a0, a1, a2};
}

Vec3 tangent_reference(const UnitNormal& n)
{
    const std::array<double, 3> mag{std::abs(n.x()), std::abs(n.y()), std::abs(n.z())};
    const auto least = std::min_element(mag.begin(), mag.end()) - mag.begin();
    Vec3 axis{};
    if (least == 0) {
        axis.x = 1.0;
    } else if (least == 1) {
        axis.y = 1.0;
    } else {
        axis.z = 1.0;
    }
    const Vec3 t = axis - n.vec() * dot(axis, n.vec());
    return t / norm(t);
}

} // namespace rsr
