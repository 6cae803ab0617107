#pragma once

#include <vector>

#include "mmpos/geometry.hpp"

namespace mmpos {

// One path's reconstructed virtual view of the target.
struct VirtualPosition {
    std::size_t path = 0;
    std::vector<Vec3> occupancy;  // occupied voxel centers of the virtual image
    Vec3 rep_a, rep_b;            // located representative antennas
    double phi = 0.0;             // XZ orientation of the a->b segment
};

// A mirror line in the XZ plane: z = slope*x + point_z - slope*point_x,
// or x = point_x when vertical.
struct XZLine {
    double slope = 0.0;
    bool vertical = false;
    Vec3 point;  // a point on the line
};

struct MappedPosition {
    double theta1_star = 0.0;
    std::vector<double> theta;  // per path
    Vec3 rep_a_star, rep_b_star;
    std::vector<std::vector<Vec3>> mapped;  // per-path mapped occupancy
    std::vector<Vec3> occupancy;            // fused set
    double objective = 0.0;                 // meters
};

// theta_ell = theta_1 + (phi_ell - phi_1)/2, wrapped to (-pi, pi].
std::vector<double> theta_chain(double theta1, const std::vector<double>& phis);

// Intersection of the back-projection lines through the two virtual
// representative points with XZ slopes tan(theta1) and tan(theta2); the y
// coordinate is the average of the two inputs.
Vec3 triangulate_point(const Vec3& xa_l1, const Vec3& xa_l2, double theta1, double theta2);

// 1-D search for the first path's mirror angle: coarse grid over (-pi, pi]
// at 0.25 degrees, golden-section refinement to 1e-6 rad; candidates score
// by the pairwise spread of the triangulated representative points.  Ties
// resolve to the smallest |theta_1|.
MappedPosition search_theta1(const std::vector<VirtualPosition>& vps);

// Mirror line recovered from a virtual/real representative pair: the
// perpendicular bisector of their displacement in XZ.
XZLine reflection_line(double theta_star, const Vec3& xa_l, const Vec3& xa_star);

// Reflects every occupied point of the virtual image across the line.
std::vector<Vec3> map_vp_to_rp(const std::vector<Vec3>& occupancy, const XZLine& line);

// Union of per-path mapped sets, deduplicated on a voxel grid of the given
// pitch (points within the same cell collapse to the first representative).
std::vector<Vec3> fuse_mapped(const std::vector<std::vector<Vec3>>& mapped, double voxel_pitch);

// Reflection of a point across an XZ line (helper shared with tests).
Vec3 reflect_across_line(const Vec3& p, const XZLine& line);

}  // namespace mmpos
