#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mmpos {

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s, fixed convention

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Vertical reflecting plane: the extrusion along Y of an XZ line.  Either
// z = slope*x + intercept, or (when `vertical` is set) x = vertical_x; the
// tagged variant keeps infinite-slope mirrors exact.
struct MirrorPlane {
    double slope = 0.0;
    double intercept = 0.0;
    bool vertical = false;
    double vertical_x = 0.0;
    std::complex<double> gamma{1.0, 0.0};  // reflection coefficient, |gamma| in (0,1]

    static MirrorPlane line(double a, double b, std::complex<double> g = {1.0, 0.0}) {
        MirrorPlane m;
        m.slope = a;
        m.intercept = b;
        m.gamma = g;
        return m;
    }
    static MirrorPlane vertical_line(double x0, std::complex<double> g = {1.0, 0.0}) {
        MirrorPlane m;
        m.vertical = true;
        m.vertical_x = x0;
        m.gamma = g;
        return m;
    }
};

struct AntennaArray {
    std::vector<Vec3> points;
};

struct Scenario {
    AntennaArray sv;       // receive aperture, planar at z = z0
    AntennaArray tv;       // transmit point lattice
    std::size_t rep_a_index = 0;
    std::size_t rep_b_index = 1;
    std::vector<MirrorPlane> mirrors;  // one entry per propagation path
    bool has_los = false;              // when true, path 0 is line-of-sight
    double sigma = 0.0;                // true clock gap, seconds
    double phase_noise_std = 0.0;      // radians
    std::uint64_t seed = 0;

    std::size_t num_paths() const { return mirrors.size() + (has_los ? 1 : 0); }
    // Mirror for path index ell; nullptr marks the line-of-sight path.
    const MirrorPlane* mirror_for_path(std::size_t ell) const {
        if (has_los) {
            if (ell == 0) return nullptr;
            return &mirrors.at(ell - 1);
        }
        return &mirrors.at(ell);
    }
    const Vec3& rep_a() const { return tv.points.at(rep_a_index); }
    const Vec3& rep_b() const { return tv.points.at(rep_b_index); }
};

// Mirror image of p across the vertical plane; Y is never altered.
Vec3 reflect_point(const Vec3& p, const MirrorPlane& plane);

// Elementwise reflection of a whole array.
AntennaArray virtual_positions(const AntennaArray& tv, const MirrorPlane& plane);

// One-way propagation delay in seconds; with a plane, the specular broken
// path tx -> plane -> rx, equal to the mirrored-source straight-line path.
double path_delay(const Vec3& tx, const Vec3& rx, const MirrorPlane* plane);

// Directed XZ-plane angle in (-pi, pi] from +X of the segment a -> b.
// Throws if the two points share their XZ projection.
double observed_angle_phi(const Vec3& rep_a, const Vec3& rep_b);

// Uniform point lattice on the surface of an axis-aligned box.  Point count
// per axis is round(size/pitch)+1 (minimum 2); interior points are skipped.
std::vector<Vec3> box_surface_lattice(const Vec3& center, const Vec3& size, double pitch);

// Regular nx-by-ny receive grid spanning [origin.x, origin.x+width] and
// [origin.y, origin.y+height] at constant z = origin.z, row-major in x.
AntennaArray planar_aperture(const Vec3& origin, double width, double height,
                             std::size_t nx, std::size_t ny);

}  // namespace mmpos
