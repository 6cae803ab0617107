#include "mmpos/geometry.hpp"

#include <algorithm>

namespace mmpos {

Vec3 reflect_point(const Vec3& p, const MirrorPlane& plane) {
    if (plane.vertical) {
        return {2.0 * plane.vertical_x - p.x, p.y, p.z};
    }
    // Reflect (x, z) across the line z = a*x + b in the XZ plane.
    const double a = plane.slope;
    const double b = plane.intercept;
    const double d = 1.0 + a * a;
    const double x = ((1.0 - a * a) * p.x + 2.0 * a * (p.z - b)) / d;
    const double z = (2.0 * a * p.x + (a * a - 1.0) * p.z + 2.0 * b) / d;
    return {x, p.y, z};
}

AntennaArray virtual_positions(const AntennaArray& tv, const MirrorPlane& plane) {
    AntennaArray out;
    out.points.reserve(tv.points.size());
    for (const Vec3& p : tv.points) out.points.push_back(reflect_point(p, plane));
    return out;
}

double path_delay(const Vec3& tx, const Vec3& rx, const MirrorPlane* plane) {
    const Vec3 src = plane ? reflect_point(tx, *plane) : tx;
    return distance(src, rx) / kSpeedOfLight;
}

double observed_angle_phi(const Vec3& rep_a, const Vec3& rep_b) {
    const double dx = rep_b.x - rep_a.x;
    const double dz = rep_b.z - rep_a.z;
    if (dx == 0.0 && dz == 0.0) {
        throw std::invalid_argument("undefined orientation: representative points share XZ projection");
    }
    return std::atan2(dz, dx);
}

std::vector<Vec3> box_surface_lattice(const Vec3& center, const Vec3& size, double pitch) {
    if (pitch <= 0.0) throw std::invalid_argument("lattice pitch must be positive");
    const auto count = [&](double s) {
        return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(s / pitch)) + 1);
    };
    const std::size_t nx = count(size.x), ny = count(size.y), nz = count(size.z);
    const auto axis = [](double c, double s, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = c - s / 2.0 + s * static_cast<double>(i) / static_cast<double>(n - 1);
        return v;
    };
    const auto xs = axis(center.x, size.x, nx);
    const auto ys = axis(center.y, size.y, ny);
    const auto zs = axis(center.z, size.z, nz);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t k = 0; k < nz; ++k) {
                const bool boundary = i == 0 || i + 1 == nx || j == 0 || j + 1 == ny ||
                                      k == 0 || k + 1 == nz;
                if (boundary) pts.push_back({xs[i], ys[j], zs[k]});
            }
    return pts;
}

AntennaArray planar_aperture(const Vec3& origin, double width, double height,
                             std::size_t nx, std::size_t ny) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("aperture grid must be non-empty");
    AntennaArray out;
    out.points.reserve(nx * ny);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double fx = nx > 1 ? static_cast<double>(i) / static_cast<double>(nx - 1) : 0.0;
            const double fy = ny > 1 ? static_cast<double>(j) / static_cast<double>(ny - 1) : 0.0;
            out.points.push_back({origin.x + width * fx, origin.y + height * fy, origin.z});
        }
    return out;
}

}  // namespace mmpos
