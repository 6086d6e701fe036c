#include "rsr/synth.hpp"

#include <random>

namespace rsr {

namespace {

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        const Vec3 v{g(rng), g(rng), g(rng)};
        const double l = norm(v);
        if (l > 1e-9) {
            return v / l;
        }
    }
}

struct Rotation {
    Vec3 r0, r1, r2;
    Vec3 apply(const Vec3& v) const { return {dot(r0, v), dot(r1, v), dot(r2, v)}; }
};

// Uniformly random rotation from a random unit quaternion.
Rotation random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
    const double l = std::sqrt(w * w + x * x + y * y + z * z);
    w /= l;
    x /= l;
    y /= l;
    z /= l;
    return {{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
            {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
            {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
}

Vec3 perpendicular_unit(const Vec3& n, std::mt19937_64& rng)
{
    const Vec3 t = tangent_reference(UnitNormal::from_unit(n));
    const Vec3 b = cross(n, t);
    const double a = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
    return t * std::cos(a) + b * std::sin(a);
}

} // namespace

PointCloud sample_sphere(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const Rotation rot = random_rotation(rng);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Point3> pos(n);
    std::vector<UnitNormal> nrm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * double(i) + 1.0) / double(n);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * double(i);
        const Vec3 p = rot.apply({rho * std::cos(phi), rho * std::sin(phi), z});
        nrm[i] = UnitNormal(p);
        pos[i] = nrm[i].vec();
    }
    return PointCloud::from_positions(std::move(pos), std::move(nrm));
}

PointCloud sample_torus(std::size_t n, double major, double minor, std::uint64_t seed)
{
    if (!(major > minor && minor > 0.0)) {
        throw std::invalid_argument("torus radii must satisfy major > minor > 0");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double shift_u = unit(rng);
    const double shift_v = unit(rng);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    const double ratio = minor / major;

    std::vector<Point3> pos(n);
    std::vector<UnitNormal> nrm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::fmod(double(i) / double(n) + shift_u, 1.0);
        const double v = std::fmod(double(i) * g + shift_v, 1.0);
        // Invert the area CDF in the minor angle: (phi + ratio sin phi) / 2π = v.
        const double target = kTwoPi * v;
        double phi = target;
        for (int it = 0; it < 50; ++it) {
            const double step = (phi + ratio * std::sin(phi) - target) / (1.0 + ratio * std::cos(phi));
            phi -= step;
            if (std::abs(step) < 1e-15) {
                break;
            }
        }
        const double theta = kTwoPi * u;
        const double ring = major + minor * std::cos(phi);
        pos[i] = {ring * std::cos(theta), ring * std::sin(theta), minor * std::sin(phi)};
        nrm[i] = UnitNormal(Vec3{std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), std::sin(phi)});
    }
    return PointCloud::from_positions(std::move(pos), std::move(nrm));
}

namespace {

std::size_t sheet_side(std::size_t n)
{
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(double(n) / 2.0))));
}

} // namespace

double two_sheets_spacing(std::size_t n)
{
    return 1.0 / double(sheet_side(n) - 1);
}

PointCloud sample_two_sheets(std::size_t n, double gap)
{
    if (!(gap > 0.0)) {
        throw std::invalid_argument("sheet gap must be positive");
    }
    const std::size_t m = sheet_side(n);
    const double h = two_sheets_spacing(n);
    std::vector<Point3> pos;
    std::vector<UnitNormal> nrm;
    pos.reserve(2 * m * m);
    for (int sheet = 0; sheet < 2; ++sheet) {
        const double z = sheet == 0 ? 0.0 : gap;
        const UnitNormal n_sheet = UnitNormal::from_unit({0.0, 0.0, sheet == 0 ? -1.0 : 1.0});
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < m; ++i) {
                pos.push_back({double(i) * h, double(j) * h, z});
                nrm.push_back(n_sheet);
            }
        }
    }
    return PointCloud::from_positions(std::move(pos), std::move(nrm));
}

PointCloud add_position_noise(const PointCloud& cloud, const NoiseSpec& spec, double e_bar)
{
    if (spec.mode != NoiseMode::Full && !cloud.has_normals()) {
        throw std::invalid_argument("directional noise needs normals");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PointCloud out = cloud;
    for (std::size_t i = 0; i < out.size(); ++i) {
        Vec3 dir;
        switch (spec.mode) {
        case NoiseMode::Full:
            dir = random_unit(rng);
            break;
        case NoiseMode::Tangential:
            dir = perpendicular_unit(cloud.normals[i].vec(), rng);
            break;
        case NoiseMode::Normal:
            dir = cloud.normals[i].vec();
            break;
        }
        out.positions[i] += dir * (spec.amplitude * e_bar * gauss(rng));
    }
    out.original_positions = out.positions;
    return out;
}

PointCloud add_normal_noise(const PointCloud& cloud, double theta_deg, std::uint64_t seed)
{
    if (!cloud.has_normals()) {
        throw std::invalid_argument("normal noise needs normals");
    }
    if (theta_deg <= 0.0) {
        return cloud;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double theta = deg_to_rad(theta_deg);
    PointCloud out = cloud;
    for (UnitNormal& n : out.normals) {
        const Vec3 axis = perpendicular_unit(n.vec(), rng);
        const double a = theta * unit(rng);
        // Rodrigues with the axis perpendicular to n.
        n = UnitNormal(n.vec() * std::cos(a) + cross(axis, n.vec()) * std::sin(a));
    }
    return out;
}

PointCloud displace_subset(const PointCloud& cloud, std::span<const VertexId> indices, double amplitude,
                           double e_bar, const Vec3& direction)
{
    PointCloud out = cloud;
    for (VertexId i : indices) {
        out.positions.at(i) += direction * (amplitude * e_bar);
    }
    out.original_positions = out.positions;
    return out;
}

} // namespace rsr
