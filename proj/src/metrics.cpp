#include "mmpos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mmpos {

namespace {
struct Cell {
    long i, j, k;
    bool operator==(const Cell&) const = default;
};
struct CellHash {
    std::size_t operator()(const Cell& c) const {
        std::size_t h = std::hash<long>{}(c.i);
        h = h * 1000003u ^ std::hash<long>{}(c.j);
        h = h * 1000003u ^ std::hash<long>{}(c.k);
        return h;
    }
};

double min_distance_to(const Vec3& a, const std::vector<Vec3>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& b : pts) best = std::min(best, distance(a, b));
    return best;
}
}  // namespace

double directed_hausdorff_brute(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty point set");
    double worst = 0.0;
    for (const Vec3& p : a) worst = std::max(worst, min_distance_to(p, b));
    return worst;
}

double directed_hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty point set");
    if (b.size() < 32) return directed_hausdorff_brute(a, b);

    // Bucket B on a uniform grid sized to a few points per cell.
    Vec3 lo = b[0], hi = b[0];
    for (const Vec3& p : b) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-9});
    const double h = extent / std::max(1.0, std::cbrt(static_cast<double>(b.size())));
    std::unordered_map<Cell, std::vector<std::size_t>, CellHash> buckets;
    const auto cell_of = [&](const Vec3& p) {
        return Cell{static_cast<long>(std::floor((p.x - lo.x) / h)),
                    static_cast<long>(std::floor((p.y - lo.y) / h)),
                    static_cast<long>(std::floor((p.z - lo.z) / h))};
    };
    for (std::size_t i = 0; i < b.size(); ++i) buckets[cell_of(b[i])].push_back(i);

    double worst = 0.0;
    for (const Vec3& p : a) {
        // Expanding Chebyshev rings of cells; a ring at index R cannot hold a
        // point closer than (R-1)*h, which bounds the search exactly.
        const Cell c = cell_of(p);
        double best = std::numeric_limits<double>::infinity();
        for (long R = 0;; ++R) {
            if (best < std::numeric_limits<double>::infinity() &&
                static_cast<double>(R - 1) * h > best)
                break;
            for (long di = -R; di <= R; ++di)
                for (long dj = -R; dj <= R; ++dj)
                    for (long dk = -R; dk <= R; ++dk) {
                        if (std::max({std::labs(di), std::labs(dj), std::labs(dk)}) != R) continue;
                        const auto it = buckets.find(Cell{c.i + di, c.j + dj, c.k + dk});
                        if (it == buckets.end()) continue;
                        for (std::size_t idx : it->second)
                            best = std::min(best, distance(p, b[idx]));
                    }
            // Far outside the bounding box, jump straight to brute force.
            if (R > 2 && best == std::numeric_limits<double>::infinity()) {
                best = min_distance_to(p, b);
                break;
            }
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::vector<SweepStats> sweep_stats(const std::vector<SweepRow>& rows) {
    std::map<double, std::vector<SweepRow>> groups;
    for (const SweepRow& r : rows) groups[r.parameter].push_back(r);
    std::vector<SweepStats> out;
    for (const auto& [param, g] : groups) {
        SweepStats s;
        s.parameter = param;
        const double n = static_cast<double>(g.size());
        for (const SweepRow& r : g) {
            s.mean_hausdorff += r.hausdorff / n;
            s.mean_directed += r.directed / n;
        }
        if (g.size() > 1) {
            double vh = 0.0, vd = 0.0;
            for (const SweepRow& r : g) {
                vh += (r.hausdorff - s.mean_hausdorff) * (r.hausdorff - s.mean_hausdorff);
                vd += (r.directed - s.mean_directed) * (r.directed - s.mean_directed);
            }
            s.std_hausdorff = std::sqrt(vh / (n - 1.0));
            s.std_directed = std::sqrt(vd / (n - 1.0));
        }
        out.push_back(s);
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepStats>& stats) {
    std::ostringstream os;
    os << "param,mean_hausdorff,std_hausdorff,mean_directed,std_directed\n";
    os.precision(9);
    for (const SweepStats& s : stats) {
        os << s.parameter << ',' << s.mean_hausdorff << ',' << s.std_hausdorff << ','
           << s.mean_directed << ',' << s.std_directed << '\n';
    }
    return os.str();
}

}  // namespace mmpos
