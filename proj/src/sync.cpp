#include "mmpos/sync.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mmpos {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a) {
    a = std::remainder(a, kTwoPi);       // (-pi, pi], with -pi possible
    if (a <= -std::numbers::pi) a += kTwoPi;
    return a;
}

double wrap_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// Residual vector F(x) - rhs in meters over the M-1 pairwise equations.
Eigen::VectorXd residual(const Vec3& x, const std::vector<double>& rhs,
                         const AntennaArray& rx) {
    const std::size_t M = rx.points.size();
    Eigen::VectorXd r(static_cast<Eigen::Index>(M - 1));
    const double d1 = distance(rx.points[0], x);
    for (std::size_t m = 1; m < M; ++m) {
        r[static_cast<Eigen::Index>(m - 1)] = distance(rx.points[m], x) - d1 - rhs[m - 1];
    }
    return r;
}

// Jacobian rows: unit(x - p_m) - unit(x - p_1).
Eigen::MatrixXd jacobian(const Vec3& x, const AntennaArray& rx) {
    const std::size_t M = rx.points.size();
    Eigen::MatrixXd G(static_cast<Eigen::Index>(M - 1), 3);
    const Vec3 r1 = x - rx.points[0];
    const double n1 = r1.norm();
    if (n1 == 0.0) throw std::invalid_argument("iterate coincides with a receive antenna");
    const Vec3 u1 = r1 / n1;
    for (std::size_t m = 1; m < M; ++m) {
        const Vec3 rm = x - rx.points[m];
        const double nm = rm.norm();
        if (nm == 0.0) throw std::invalid_argument("iterate coincides with a receive antenna");
        const Vec3 u = rm / nm - u1;
        G(static_cast<Eigen::Index>(m - 1), 0) = u.x;
        G(static_cast<Eigen::Index>(m - 1), 1) = u.y;
        G(static_cast<Eigen::Index>(m - 1), 2) = u.z;
    }
    return G;
}

Vec3 aperture_centroid(const AntennaArray& rx) {
    Vec3 c;
    for (const Vec3& p : rx.points) c += p;
    return c / static_cast<double>(rx.points.size());
}

double aperture_diagonal(const AntennaArray& rx) {
    double lo_x = rx.points[0].x, hi_x = lo_x, lo_y = rx.points[0].y, hi_y = lo_y;
    for (const Vec3& p : rx.points) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
}
}  // namespace

PdoaMeasurement extract_eta(const DemodulatedSignal& sig, double delta) {
    PdoaMeasurement out;
    out.num_paths = sig.num_paths;
    out.num_rx = sig.num_rx;
    out.delta = delta;
    out.eta_a.resize(sig.num_paths * sig.num_rx);
    out.eta_b.resize(sig.num_paths * sig.num_rx);
    for (std::size_t ell = 0; ell < sig.num_paths; ++ell) {
        for (std::size_t m = 0; m < sig.num_rx; ++m) {
            const auto diff = [](std::complex<double> t0, std::complex<double> t1) {
                if (std::abs(t0) == 0.0 || std::abs(t1) == 0.0)
                    throw std::invalid_argument("degenerate phasor");
                return wrap_pi(std::arg(t0 * std::conj(t1)));
            };
            out.eta_a[ell * sig.num_rx + m] = diff(sig.alpha(ell, m, 0), sig.alpha(ell, m, 1));
            out.eta_b[ell * sig.num_rx + m] = diff(sig.beta(ell, m, 0), sig.beta(ell, m, 1));
        }
    }
    return out;
}

std::vector<double> tdoa_rhs(const std::vector<double>& eta_row, double delta) {
    const std::size_t M = eta_row.size();
    if (M < 4) throw std::invalid_argument("underdetermined: need at least 4 receive antennas");
    std::vector<double> rhs(M - 1);
    for (std::size_t m = 1; m < M; ++m) {
        rhs[m - 1] = kSpeedOfLight * wrap_pi(eta_row[m] - eta_row[0]) / (kTwoPi * delta);
    }
    return rhs;
}

Vec3 initial_guess(const std::vector<double>& rhs, const AntennaArray& rx) {
    const std::size_t M = rx.points.size();
    if (M < 4) throw std::invalid_argument("underdetermined: need at least 4 receive antennas");

    double max_rhs = 0.0;
    for (double v : rhs) max_rhs = std::max(max_rhs, std::abs(v));
    const Vec3 centroid = aperture_centroid(rx);
    const double reach = max_rhs + aperture_diagonal(rx) + 1.0;
    Vec3 seed = centroid;
    seed.z += reach;

    // Greedy max-area triple of baselines from the reference antenna.
    const Vec3& p1 = rx.points[0];
    std::size_t i1 = 1;
    for (std::size_t m = 1; m < M; ++m)
        if (distance(rx.points[m], p1) > distance(rx.points[i1], p1)) i1 = m;
    const Vec3 b1 = rx.points[i1] - p1;
    std::size_t i2 = 0;
    double best = -1.0;
    for (std::size_t m = 1; m < M; ++m) {
        if (m == i1) continue;
        const Vec3 b = rx.points[m] - p1;
        const Vec3 cr{b1.y * b.z - b1.z * b.y, b1.z * b.x - b1.x * b.z, b1.x * b.y - b1.y * b.x};
        if (cr.norm() > best) {
            best = cr.norm();
            i2 = m;
        }
    }
    std::size_t i3 = 0;
    best = -1.0;
    for (std::size_t m = 1; m < M; ++m) {
        if (m == i1 || m == i2) continue;
        const double area = distance(rx.points[m], rx.points[i1]) +
                            distance(rx.points[m], rx.points[i2]);
        if (area > best) {
            best = area;
            i3 = m;
        }
    }

    AntennaArray sub;
    sub.points = {p1, rx.points[i1], rx.points[i2], rx.points[i3]};
    const std::vector<double> sub_rhs = {rhs[i1 - 1], rhs[i2 - 1], rhs[i3 - 1]};

    // Damped Newton on the square 3-equation system, multi-started from the
    // boresight direction and four tilted directions so off-axis emitters do
    // not strand the solve on a wrong hyperbola branch.  Candidates score by
    // the full-system residual.
    const auto newton_from = [&](Vec3 x) {
        double res = residual(x, sub_rhs, sub).norm();
        for (int it = 0; it < 100; ++it) {
            const Eigen::MatrixXd J = jacobian(x, sub);
            const Eigen::VectorXd r = residual(x, sub_rhs, sub);
            const Eigen::Vector3d h = J.colPivHouseholderQr().solve(-r);
            double s = 1.0;
            bool accepted = false;
            for (int half = 0; half <= 8; ++half) {
                const Vec3 cand{x.x + s * h[0], x.y + s * h[1], x.z + s * h[2]};
                const double cand_res = residual(cand, sub_rhs, sub).norm();
                if (cand_res < res) {
                    x = cand;
                    res = cand_res;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted) break;
            if (h.norm() * s < 1e-10) break;
        }
        return x;
    };

    const double z0 = rx.points[0].z;
    Vec3 best_x = seed;
    double best_res = std::numeric_limits<double>::infinity();
    constexpr double tilt = 0.7;  // ~35 degrees off boresight
    const Vec3 dirs[] = {{0.0, 0.0, 1.0}, {tilt, 0.0, 1.0}, {-tilt, 0.0, 1.0},
                         {0.0, tilt, 1.0}, {0.0, -tilt, 1.0}};
    constexpr double kMaxReach = 100.0;  // far branches flatten the residual
    for (const Vec3& d : dirs) {
        Vec3 x = newton_from(centroid + d * (reach / d.norm()));
        if (x.z < z0) x.z = 2.0 * z0 - x.z;  // keep the front half-space solution
        if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(x.z)) continue;
        const Vec3 off = x - centroid;
        if (off.norm() > kMaxReach) x = centroid + off * (kMaxReach / off.norm());
        const double full = residual(x, rhs, rx).norm();
        if (full < best_res) {
            best_res = full;
            best_x = x;
        }
    }
    return best_x;
}

LocateResult gauss_newton_locate(const std::vector<double>& rhs, const AntennaArray& rx,
                                 const Vec3& init) {
    const std::size_t M = rx.points.size();
    if (M < 4) throw std::invalid_argument("underdetermined: need at least 4 receive antennas");
    if (!std::isfinite(init.x) || !std::isfinite(init.y) || !std::isfinite(init.z))
        throw std::invalid_argument("non-finite initial point");

    LocateResult out;
    Vec3 x = init;
    double res = residual(x, rhs, rx).norm();
    for (std::size_t it = 0; it < 50; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd G = jacobian(x, rx);
        const Eigen::Matrix3d gtg = G.transpose() * G;
        const Eigen::JacobiSVD<Eigen::Matrix3d> svd(gtg);
        const double smin = svd.singularValues()(2);
        if (smin <= 0.0 || svd.singularValues()(0) / smin > 1e12)
            throw std::runtime_error("degenerate aperture geometry");
        const Eigen::VectorXd r = residual(x, rhs, rx);
        const Eigen::Vector3d h = gtg.ldlt().solve(G.transpose() * (-r));
        double s = 1.0;
        bool accepted = false;
        for (int half = 0; half <= 8; ++half) {
            const Vec3 cand{x.x + s * h[0], x.y + s * h[1], x.z + s * h[2]};
            const double cand_res = residual(cand, rhs, rx).norm();
            if (cand_res < res) {
                x = cand;
                res = cand_res;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // Stagnating with a residual at the rounding floor is convergence,
            // not failure: no step can improve an already-exact fit.
            out.converged = res < 1e-9;
            break;
        }
        // Stopping well below the nominal 1e-9 m keeps noiseless locates at
        // the rounding floor; the mirror-angle search needs that headroom.
        if (s * h.norm() < 1e-12) {
            out.converged = true;
            break;
        }
    }
    const double z0 = rx.points[0].z;
    if (x.z < z0) x.z = 2.0 * z0 - x.z;
    out.position = x;
    out.residual_norm = res;
    return out;
}

double estimate_sigma(const Vec3& x_hat, const std::vector<double>& eta_row,
                      const AntennaArray& rx, double delta) {
    double acc = 0.0;
    for (std::size_t m = 0; m < rx.points.size(); ++m) {
        const double eta = wrap_2pi(eta_row[m]);
        acc += distance(rx.points[m], x_hat) / kSpeedOfLight - eta / (kTwoPi * delta);
    }
    return acc / static_cast<double>(rx.points.size());
}

std::array<std::array<double, 3>, 3> sync_covariance(const Vec3& x_hat, const AntennaArray& rx,
                                                     double sigma_z, double delta) {
    const Eigen::MatrixXd G = jacobian(x_hat, rx);
    const Eigen::Matrix3d gtg = G.transpose() * G;
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(gtg);
    if (svd.singularValues()(2) <= 0.0 ||
        svd.singularValues()(0) / svd.singularValues()(2) > 1e12)
        throw std::runtime_error("singular normal matrix");
    const double scale = kSpeedOfLight / (kTwoPi * delta);
    const Eigen::Matrix3d cov = gtg.inverse() * (sigma_z * sigma_z * scale * scale);
    std::array<std::array<double, 3>, 3> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov(i, j);
    return out;
}

SyncEstimate synchronize(const DemodulatedSignal& sig, const AntennaArray& rx, double delta) {
    const PdoaMeasurement meas = extract_eta(sig, delta);
    SyncEstimate est;
    double sigma_acc = 0.0;
    for (std::size_t ell = 0; ell < meas.num_paths; ++ell) {
        const auto solve_one = [&](const std::vector<double>& full_eta) {
            std::vector<double> row(full_eta.begin() + static_cast<std::ptrdiff_t>(ell * meas.num_rx),
                                    full_eta.begin() + static_cast<std::ptrdiff_t>((ell + 1) * meas.num_rx));
            const std::vector<double> rhs = tdoa_rhs(row, delta);
            const Vec3 init = initial_guess(rhs, rx);
            LocateResult loc;
            try {
                loc = gauss_newton_locate(rhs, rx, init);
            } catch (const std::exception&) {
                // Noise drove the iterate into degenerate territory; keep the
                // seed so the remaining paths can still be processed.
                loc.position = init;
                loc.converged = false;
            }
            const double sig_m = estimate_sigma(loc.position, row, rx, delta);
            return std::make_pair(loc, sig_m);
        };
        auto [loc_a, sig_a] = solve_one(meas.eta_a);
        auto [loc_b, sig_b] = solve_one(meas.eta_b);
        est.positions_a.push_back(loc_a.position);
        est.positions_b.push_back(loc_b.position);
        est.detail_a.push_back(loc_a);
        est.detail_b.push_back(loc_b);
        sigma_acc += sig_a + sig_b;
    }
    est.sigma_hat = sigma_acc / (2.0 * static_cast<double>(meas.num_paths));
    return est;
}

}  // namespace mmpos
