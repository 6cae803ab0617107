#include "mmpos/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace mmpos {

namespace {
constexpr double kPi = std::numbers::pi;

double wrap_pi(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

// Candidate representative points for one trial theta1; pairs whose
// back-projection lines are near-parallel are skipped.
struct Candidates {
    std::vector<Vec3> za, zb;
};

Candidates candidates_for(const std::vector<VirtualPosition>& vps,
                          const std::vector<double>& theta) {
    Candidates c;
    for (std::size_t l = 1; l < vps.size(); ++l) {
        if (std::abs(std::tan(theta[0]) - std::tan(theta[l])) < 1e-6) continue;
        c.za.push_back(triangulate_point(vps[0].rep_a, vps[l].rep_a, theta[0], theta[l]));
        c.zb.push_back(triangulate_point(vps[0].rep_b, vps[l].rep_b, theta[0], theta[l]));
    }
    return c;
}

double spread_objective(const Candidates& c) {
    double obj = 0.0;
    for (std::size_t p = 0; p < c.za.size(); ++p)
        for (std::size_t q = 0; q < c.za.size(); ++q)
            obj += distance(c.za[q], c.za[p]) + distance(c.zb[q], c.zb[p]);
    return obj;
}

Vec3 mean_point(const std::vector<Vec3>& pts) {
    Vec3 acc;
    for (const Vec3& p : pts) acc += p;
    return acc / static_cast<double>(pts.size());
}
}  // namespace

std::vector<double> theta_chain(double theta1, const std::vector<double>& phis) {
    if (phis.size() < 2) throw std::invalid_argument("need at least two paths");
    std::vector<double> out(phis.size());
    for (std::size_t l = 0; l < phis.size(); ++l)
        out[l] = wrap_pi(theta1 + (phis[l] - phis[0]) / 2.0);
    return out;
}

Vec3 triangulate_point(const Vec3& xa_l1, const Vec3& xa_l2, double theta1, double theta2) {
    const double t1 = std::tan(theta1), t2 = std::tan(theta2);
    if (std::abs(t1 - t2) < 1e-9) throw std::invalid_argument("parallel back-projections");
    if (std::abs(xa_l1.y - xa_l2.y) > 0.5)
        throw std::invalid_argument("non-vertical mirror detected");
    const double x = ((xa_l1.z - xa_l2.z) + (xa_l2.x * t2 - xa_l1.x * t1)) / (t2 - t1);
    const double z = xa_l1.z + t1 * (x - xa_l1.x);
    return {x, 0.5 * (xa_l1.y + xa_l2.y), z};
}

MappedPosition search_theta1(const std::vector<VirtualPosition>& vps) {
    if (vps.size() < 3) throw std::invalid_argument("need at least three paths");
    std::vector<double> phis;
    for (const auto& vp : vps) phis.push_back(vp.phi);

    const auto evaluate = [&](double theta1) {
        const Candidates c = candidates_for(vps, theta_chain(theta1, phis));
        if (c.za.size() < 2) return std::numeric_limits<double>::infinity();
        return spread_objective(c);
    };

    // Coarse sweep at 0.25 degrees over (-pi, pi].
    const double step = 0.25 * kPi / 180.0;
    double best_theta = 0.0;
    double best_obj = std::numeric_limits<double>::infinity();
    bool any = false;
    const auto n_steps = static_cast<long>(std::ceil(2.0 * kPi / step));
    for (long i = 0; i < n_steps; ++i) {
        const double theta = -kPi + step * static_cast<double>(i + 1);
        const double obj = evaluate(theta);
        if (!std::isfinite(obj)) continue;
        any = true;
        const bool better =
            obj < best_obj - 1e-12 ||
            (std::abs(obj - best_obj) <= 1e-12 && std::abs(theta) < std::abs(best_theta));
        if (better) {
            best_obj = obj;
            best_theta = theta;
        }
    }
    if (!any) throw std::runtime_error("unresolvable geometry");

    // Golden-section refinement of the winning bracket.  The objective is
    // V-shaped near its minimum (linear in the angle error), so the bracket
    // is shrunk far below the nominal 1e-6 rad to drive noiseless runs to a
    // numerically-zero spread.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_theta - step, hi = best_theta + step;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = evaluate(c), fd = evaluate(d);
    while (hi - lo > 1e-12) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = evaluate(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = evaluate(d);
        }
    }
    double theta1 = 0.5 * (lo + hi);
    if (evaluate(best_theta) < evaluate(theta1)) theta1 = best_theta;

    MappedPosition mp;
    mp.theta1_star = theta1;
    mp.theta = theta_chain(theta1, phis);
    const Candidates cand = candidates_for(vps, mp.theta);
    if (cand.za.size() < 2) throw std::runtime_error("unresolvable geometry");
    mp.objective = spread_objective(cand);
    mp.rep_a_star = mean_point(cand.za);
    mp.rep_b_star = mean_point(cand.zb);
    return mp;
}

XZLine reflection_line(double theta_star, const Vec3& xa_l, const Vec3& xa_star) {
    const double dx = xa_l.x - xa_star.x, dz = xa_l.z - xa_star.z;
    if (std::hypot(dx, dz) < 1e-12)
        throw std::invalid_argument("zero displacement, mirror undefined");
    XZLine line;
    line.point = (xa_l + xa_star) / 2.0;
    const double t = std::tan(theta_star);
    if (std::abs(t) < 1e-12) {
        line.vertical = true;  // horizontal back-projection -> vertical mirror
    } else {
        line.slope = -1.0 / t;
    }
    return line;
}

Vec3 reflect_across_line(const Vec3& p, const XZLine& line) {
    if (line.vertical) return {2.0 * line.point.x - p.x, p.y, p.z};
    const double s = line.slope;
    const double inv = 1.0 / (1.0 + s * s);
    const double vx = p.x - line.point.x, vz = p.z - line.point.z;
    const double proj = (vx + s * vz) * inv;  // component along the line direction (1, s)
    return {line.point.x + 2.0 * proj - vx, p.y, line.point.z + 2.0 * proj * s - vz};
}

std::vector<Vec3> map_vp_to_rp(const std::vector<Vec3>& occupancy, const XZLine& line) {
    std::vector<Vec3> out;
    out.reserve(occupancy.size());
    for (const Vec3& p : occupancy) out.push_back(reflect_across_line(p, line));
    return out;
}

std::vector<Vec3> fuse_mapped(const std::vector<std::vector<Vec3>>& mapped, double voxel_pitch) {
    if (mapped.empty()) throw std::invalid_argument("need at least one mapped set");
    if (voxel_pitch <= 0.0) throw std::invalid_argument("voxel pitch must be positive");
    std::map<std::tuple<long, long, long>, bool> seen;
    std::vector<Vec3> out;
    const auto cell = [&](double v) { return static_cast<long>(std::floor(v / voxel_pitch)); };
    for (const auto& set : mapped)
        for (const Vec3& p : set) {
            const auto key = std::make_tuple(cell(p.x), cell(p.y), cell(p.z));
            if (!seen.emplace(key, true).second) continue;
            out.push_back(p);
        }
    return out;
}

}  // namespace mmpos
