#include "mmpos/imaging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace mmpos {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> cis(double phase) {
    return {std::cos(phase), std::sin(phase)};
}

// The receive aperture reinterpreted as a regular (nx, ny) grid.
struct ApertureGrid {
    std::vector<double> xs, ys;
    double z0 = 0.0;
    std::vector<std::size_t> index;  // grid cell (ix*ny + iy) -> rx index
};

ApertureGrid analyze_aperture(const AntennaArray& rx) {
    constexpr double tol = 1e-9;
    ApertureGrid g;
    g.z0 = rx.points.at(0).z;
    std::vector<double> xs, ys;
    for (const Vec3& p : rx.points) {
        if (std::abs(p.z - g.z0) > tol)
            throw std::invalid_argument("aperture must be regular grid: not coplanar");
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    const auto uniq = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        std::vector<double> out;
        for (double x : v)
            if (out.empty() || x - out.back() > tol) out.push_back(x);
        return out;
    };
    g.xs = uniq(xs);
    g.ys = uniq(ys);
    if (g.xs.size() * g.ys.size() != rx.points.size())
        throw std::invalid_argument("aperture must be regular grid: incomplete lattice");
    for (const auto& axis : {g.xs, g.ys}) {
        for (std::size_t i = 2; i < axis.size(); ++i) {
            if (std::abs((axis[i] - axis[i - 1]) - (axis[1] - axis[0])) > 1e-7)
                throw std::invalid_argument("aperture must be regular grid: uneven spacing");
        }
    }
    g.index.assign(rx.points.size(), 0);
    for (std::size_t m = 0; m < rx.points.size(); ++m) {
        const auto ix = static_cast<std::size_t>(
            std::lower_bound(g.xs.begin(), g.xs.end(), rx.points[m].x - tol) - g.xs.begin());
        const auto iy = static_cast<std::size_t>(
            std::lower_bound(g.ys.begin(), g.ys.end(), rx.points[m].y - tol) - g.ys.begin());
        g.index[ix * g.ys.size() + iy] = m;
    }
    return g;
}

// Range of direction cosines from the aperture extent to the grid extent.
std::pair<double, double> dircos_range(double plo, double phi, double alo, double ahi,
                                       double zlo, double zhi) {
    double lo = 1.0, hi = -1.0;
    for (double p : {plo, phi})
        for (double a : {alo, ahi})
            for (double z : {zlo, zhi}) {
                const double s = (p - a) / std::hypot(p - a, z);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
    return {lo, hi};
}
}  // namespace

double VoxelImage::max_magnitude() const {
    double mx = 0.0;
    for (const auto& c : continuous) mx = std::max(mx, std::abs(c));
    return mx;
}

std::vector<Vec3> VoxelImage::occupied_points() const {
    std::vector<Vec3> pts;
    if (binary.empty()) return pts;
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t k = 0; k < grid.nz; ++k)
                if (binary[(i * grid.ny + j) * grid.nz + k]) pts.push_back(grid.voxel_center(i, j, k));
    return pts;
}

PathSignal extract_path(const DemodulatedSignal& sig, std::size_t ell) {
    PathSignal out;
    out.num_rx = sig.num_rx;
    out.num_freq = sig.num_freq;
    out.phasors.resize(out.num_rx * out.num_freq);
    for (std::size_t m = 0; m < out.num_rx; ++m)
        for (std::size_t k = 0; k < out.num_freq; ++k) out.at(m, k) = sig.at(ell, m, k);
    return out;
}

void resync_phasors(DemodulatedSignal& sig, const SfcwSpec& spec, double sigma_hat) {
    const double shift = sigma_hat - sig.sigma_tilde_used;
    if (shift == 0.0) return;
    for (std::size_t ell = 0; ell < sig.num_paths; ++ell)
        for (std::size_t m = 0; m < sig.num_rx; ++m)
            for (std::size_t k = 0; k < sig.num_freq; ++k)
                sig.at(ell, m, k) *= cis(-kTwoPi * spec.freq(k) * shift);
    sig.sigma_tilde_used = sigma_hat;
}

std::vector<std::complex<double>> stolt_resample(const std::vector<double>& axis_in,
                                                 const std::vector<std::complex<double>>& values,
                                                 const std::vector<double>& axis_out) {
    if (axis_in.size() != values.size() || axis_in.size() < 2)
        throw std::invalid_argument("stolt: need matching axis/values with at least two samples");
    for (std::size_t i = 1; i < axis_in.size(); ++i)
        if (!(axis_in[i] > axis_in[i - 1]))
            throw std::invalid_argument("stolt: input axis must be strictly increasing");
    std::vector<std::complex<double>> out(axis_out.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < axis_out.size(); ++i) {
        const double t = axis_out[i];
        if (t < axis_in.front() || t > axis_in.back()) continue;
        const auto hi = std::lower_bound(axis_in.begin(), axis_in.end(), t);
        if (hi == axis_in.begin()) {
            out[i] = values.front();
            continue;
        }
        const auto j = static_cast<std::size_t>(hi - axis_in.begin());
        if (j == axis_in.size()) {
            out[i] = values.back();
            continue;
        }
        const double f = (t - axis_in[j - 1]) / (axis_in[j] - axis_in[j - 1]);
        out[i] = values[j - 1] * (1.0 - f) + values[j] * f;
    }
    return out;
}

VoxelImage reconstruct_image(const PathSignal& sig, const AntennaArray& rx, const SfcwSpec& spec,
                             std::complex<double> gamma, const GridSpec& grid) {
    if (std::abs(gamma) == 0.0) throw std::invalid_argument("zero reflection coefficient");
    const ApertureGrid ap = analyze_aperture(rx);
    const std::size_t Nx = ap.xs.size(), Ny = ap.ys.size(), K = sig.num_freq;
    if (Nx < 2) throw std::invalid_argument("aperture must span the x axis");
    const double dxa = ap.xs[1] - ap.xs[0];
    const double dya = Ny > 1 ? ap.ys[1] - ap.ys[0] : 1.0;

    // Spatial frequencies in cycles per meter.
    std::vector<double> fk(K);
    for (std::size_t k = 0; k < K; ++k) fk[k] = spec.freq(k) / kSpeedOfLight;
    const double f1c = fk.front(), fKc = fk.back();
    const double dfc = spec.delta / kSpeedOfLight;

    const double xlo = grid.origin.x, xhi = grid.origin.x + grid.pitch * static_cast<double>(grid.nx - 1);
    const double ylo = grid.origin.y, yhi = grid.origin.y + grid.pitch * static_cast<double>(grid.ny - 1);
    const double zlo = grid.origin.z, zhi = grid.origin.z + grid.pitch * static_cast<double>(grid.nz - 1);

    // Spectral bin sizes: the implied periodic window must exceed the grid
    // span by a guard band so sidelobes of out-of-grid energy cannot fold in.
    constexpr double guard_xz = 4.0, guard_y = 2.0, spec_pad = 0.08;
    const auto fit_bin = [](double span, double g, double d) {
        const auto P = static_cast<std::size_t>(std::ceil((span + g) / d));
        return 1.0 / (static_cast<double>(P) * d);
    };
    double du = fit_bin(xhi - xlo, guard_xz, dxa);
    double dv = Ny > 1 ? fit_bin(yhi - ylo, guard_y, dya) : 1.0;
    const double dw = 1.0 / ((zhi - zlo) + guard_xz);

    // Angular support of the grid as seen from the aperture, padded.
    const double zrel_lo = std::max(zlo - ap.z0, 0.3);
    const double zrel_hi = std::max(zhi - ap.z0, 0.4);
    auto [sxlo, sxhi] = dircos_range(xlo, xhi, ap.xs.front(), ap.xs.back(), zrel_lo, zrel_hi);
    sxlo = std::max(sxlo - spec_pad, -0.98);
    sxhi = std::min(sxhi + spec_pad, 0.98);
    double sylo = 0.0, syhi = 0.0;
    if (Ny > 1) {
        std::tie(sylo, syhi) = dircos_range(ylo, yhi, ap.ys.front(), ap.ys.back(), zrel_lo, zrel_hi);
        sylo = std::max(sylo - spec_pad, -0.98);
        syhi = std::min(syhi + spec_pad, 0.98);
    }
    // Bound the spectral workload: a wildly mislocated grid can demand a huge
    // angular window; coarsening the bins trades guard-band margin for a hard
    // compute ceiling without touching well-posed reconstructions.
    {
        constexpr double kMaxBins = 1.5e6;
        const double ub = (sxhi - sxlo) * fKc / du + 1.0;
        const double vb = Ny > 1 ? (syhi - sylo) * fKc / dv + 1.0 : 1.0;
        if (ub * vb > kMaxBins) {
            const double s = std::sqrt(ub * vb / kMaxBins);
            du *= s;
            if (Ny > 1) dv *= s;
        }
    }
    const auto iu0 = static_cast<long>(std::floor(sxlo * fKc / du));
    const auto iu1 = static_cast<long>(std::ceil(sxhi * fKc / du));
    const auto iv0 = Ny > 1 ? static_cast<long>(std::floor(sylo * fKc / dv)) : 0L;
    const auto iv1 = Ny > 1 ? static_cast<long>(std::ceil(syhi * fKc / dv)) : 0L;
    const std::size_t U = static_cast<std::size_t>(iu1 - iu0 + 1);
    const std::size_t V = static_cast<std::size_t>(iv1 - iv0 + 1);
    std::vector<double> u(U), v(V);
    for (std::size_t i = 0; i < U; ++i) u[i] = static_cast<double>(iu0 + static_cast<long>(i)) * du;
    for (std::size_t i = 0; i < V; ++i) v[i] = static_cast<double>(iv0 + static_cast<long>(i)) * dv;

    // Uniform depth-frequency axis covering the direction cone of the grid.
    const double smax2 = std::min(
        std::max(sxlo * sxlo, sxhi * sxhi) + std::max(sylo * sylo, syhi * syhi), 0.96);
    const double w0 = std::floor(f1c * std::sqrt(1.0 - smax2) / dw) * dw;
    const std::size_t nw = static_cast<std::size_t>(std::ceil((fKc - w0) / dw)) + 2;
    std::vector<double> wax(nw);
    for (std::size_t i = 0; i < nw; ++i) wax[i] = w0 + static_cast<double>(i) * dw;

    using Cd = std::complex<double>;
    using Mat = Eigen::Matrix<Cd, Eigen::Dynamic, Eigen::Dynamic>;

    // Measurements as (Nx) x (Ny*K), reflection coefficient divided out.
    Mat Y(Nx, Ny * K);
    for (std::size_t ix = 0; ix < Nx; ++ix)
        for (std::size_t iy = 0; iy < Ny; ++iy) {
            const std::size_t m = ap.index[ix * Ny + iy];
            for (std::size_t k = 0; k < K; ++k)
                Y(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iy * K + k)) =
                    sig.at(m, k) / gamma;
        }

    // First-axis aperture DFT for all requested u bins at once.
    Mat Eu(U, Nx);
    for (std::size_t i = 0; i < U; ++i)
        for (std::size_t ix = 0; ix < Nx; ++ix)
            Eu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ix)) =
                cis(-kTwoPi * u[i] * ap.xs[ix]);
    const Mat Sx = Eu * Y;  // (U) x (Ny*K)

    Mat Ev(V, Ny);
    for (std::size_t i = 0; i < V; ++i)
        for (std::size_t iy = 0; iy < Ny; ++iy)
            Ev(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(iy)) =
                cis(-kTwoPi * v[i] * ap.ys[iy]);

    // Image-side partial transforms.
    Mat Ay(grid.ny, V);
    for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t i = 0; i < V; ++i)
            Ay(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                cis(kTwoPi * v[i] * (ylo + grid.pitch * static_cast<double>(j)));
    Mat Az(nw, grid.nz);
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t k = 0; k < grid.nz; ++k)
            Az(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                cis(kTwoPi * wax[i] * (zlo + grid.pitch * static_cast<double>(k)));

    // Per-u pipeline: second-axis DFT, depth resampling with the reference
    // phase, then evaluation on the (y, z) voxel planes.  Independent per u.
    Mat G(U, grid.ny * grid.nz);
    const auto process_u = [&](std::size_t i) {
        Mat Sc(Ny, K);
        for (std::size_t iy = 0; iy < Ny; ++iy)
            for (std::size_t k = 0; k < K; ++k)
                Sc(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(k)) =
                    Sx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(iy * K + k));
        const Mat Sv = Ev * Sc;  // (V) x (K)
        Mat Su(V, nw);
        for (std::size_t j = 0; j < V; ++j) {
            const double rho2 = u[i] * u[i] + v[j] * v[j];
            for (std::size_t iw = 0; iw < nw; ++iw) {
                const double w = wax[iw];
                const double ft = std::sqrt(w * w + rho2);
                const auto k0 = static_cast<long>(std::floor((ft - f1c) / dfc));
                Cd val{0.0, 0.0};
                if (k0 >= 0 && k0 + 1 < static_cast<long>(K)) {
                    const auto kk = static_cast<std::size_t>(k0);
                    const double w_lo2 = fk[kk] * fk[kk] - rho2;
                    const double w_hi2 = fk[kk + 1] * fk[kk + 1] - rho2;
                    if (w_lo2 > 0.0 && w_hi2 > 0.0) {
                        const double w_lo = std::sqrt(w_lo2), w_hi = std::sqrt(w_hi2);
                        const double t = std::clamp((w - w_lo) / (w_hi - w_lo), 0.0, 1.0);
                        val = Sv(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(kk)) * (1.0 - t) +
                              Sv(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(kk + 1)) * t;
                        val *= cis(-kTwoPi * w * ap.z0);  // aperture-plane reference
                    }
                }
                Su(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(iw)) = val;
            }
        }
        const Mat T = (Ay * Su) * Az;  // (ny) x (nz)
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t k = 0; k < grid.nz; ++k)
                G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j * grid.nz + k)) =
                    T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    };
    const std::size_t workers = std::min<std::size_t>(std::thread::hardware_concurrency() > 0
                                                          ? std::thread::hardware_concurrency()
                                                          : 1,
                                                      U);
    if (workers > 1) {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < U; i += workers) process_u(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < U; ++i) process_u(i);
    }

    // Final x-axis evaluation on the voxel centers.
    Mat Ax(grid.nx, U);
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < U; ++j)
            Ax(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                cis(kTwoPi * u[j] * (xlo + grid.pitch * static_cast<double>(i)));
    const Mat I = Ax * G;  // (nx) x (ny*nz)

    VoxelImage img;
    img.grid = grid;
    img.continuous.resize(grid.size());
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t k = 0; k < grid.nz; ++k)
                img.at(i, j, k) = I(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j * grid.nz + k));
    return img;
}

VoxelImage backprojection_oracle(const PathSignal& sig, const AntennaArray& rx,
                                 const SfcwSpec& spec, const GridSpec& grid) {
    VoxelImage img;
    img.grid = grid;
    img.continuous.assign(grid.size(), {0.0, 0.0});
    const auto slice = [&](std::size_t i) {
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t k = 0; k < grid.nz; ++k) {
                const Vec3 x = grid.voxel_center(i, j, k);
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t m = 0; m < sig.num_rx; ++m) {
                    const double d = distance(x, rx.points[m]);
                    // Tone recurrence: the per-tone phase advances geometrically.
                    std::complex<double> cur = cis(kTwoPi * spec.f1 * d / kSpeedOfLight);
                    const std::complex<double> step = cis(kTwoPi * spec.delta * d / kSpeedOfLight);
                    for (std::size_t kk = 0; kk < sig.num_freq; ++kk) {
                        acc += sig.at(m, kk) * cur;
                        cur *= step;
                    }
                }
                img.at(i, j, k) = acc;
            }
    };
    const std::size_t workers =
        std::min<std::size_t>(std::thread::hardware_concurrency() > 0
                                  ? std::thread::hardware_concurrency()
                                  : 1,
                              grid.nx);
    if (workers > 1) {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < grid.nx; i += workers) slice(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < grid.nx; ++i) slice(i);
    }
    return img;
}

void threshold_image(VoxelImage& img, double nu) {
    if (nu < 0.0 || nu > 1.0) throw std::invalid_argument("threshold must lie in [0, 1]");
    img.nu = nu;
    img.binary.assign(img.continuous.size(), 0);
    const double mx = img.max_magnitude();
    for (std::size_t i = 0; i < img.continuous.size(); ++i) {
        const double norm = mx > 0.0 ? std::abs(img.continuous[i]) / mx : 0.0;
        img.binary[i] = norm >= nu ? 1 : 0;
    }
}

double azimuth_resolution(double f_center, double aperture_size, double range) {
    if (range <= 0.0) throw std::invalid_argument("range must be positive");
    return kSpeedOfLight * std::hypot(aperture_size, range) / (2.0 * f_center * range);
}

double range_resolution(double f1, double f_last) {
    if (f_last <= f1) throw std::invalid_argument("band must have positive width");
    return kSpeedOfLight / (f_last - f1);
}

SamplingReport check_sampling(double dx, double dy, double f_center, double delta, double r_max) {
    SamplingReport rep;
    rep.spacing_limit = kSpeedOfLight / (2.0 * f_center);
    rep.spacing_actual = std::max(dx, dy);
    rep.spacing_ok = rep.spacing_actual <= rep.spacing_limit;
    rep.delta_limit = kSpeedOfLight / r_max;
    rep.delta_actual = delta;
    rep.delta_ok = delta <= rep.delta_limit;
    if (!rep.spacing_ok)
        rep.warnings.push_back("aperture spacing " + std::to_string(rep.spacing_actual) +
                               " m exceeds the alias-free limit " +
                               std::to_string(rep.spacing_limit) + " m");
    if (!rep.delta_ok)
        rep.warnings.push_back("frequency gap " + std::to_string(delta) +
                               " Hz exceeds the unambiguous-range limit " +
                               std::to_string(rep.delta_limit) + " Hz");
    return rep;
}

}  // namespace mmpos
