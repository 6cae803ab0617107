#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mmpos/geometry.hpp"
#include "mmpos/signal.hpp"

namespace mmpos {

// Per-path, per-rx two-tone phase differences, wrapped to (-pi, pi].
// eta encodes 2*pi*delta*(tau - sigma) for the emitting antenna.
struct PdoaMeasurement {
    std::size_t num_paths = 0;
    std::size_t num_rx = 0;
    double delta = 0.0;
    std::vector<double> eta_a;  // [path][rx], antenna a
    std::vector<double> eta_b;  // [path][rx], antenna b

    double a(std::size_t ell, std::size_t m) const { return eta_a[ell * num_rx + m]; }
    double b(std::size_t ell, std::size_t m) const { return eta_b[ell * num_rx + m]; }
};

struct LocateResult {
    Vec3 position;
    std::size_t iterations = 0;
    double residual_norm = 0.0;  // meters
    bool converged = false;
};

struct SyncEstimate {
    std::vector<Vec3> positions_a;  // per path
    std::vector<Vec3> positions_b;
    double sigma_hat = 0.0;  // seconds
    std::vector<LocateResult> detail_a;
    std::vector<LocateResult> detail_b;
};

// Phase difference of the two tones per entry: arg(tone0 * conj(tone1)),
// which equals 2*pi*delta*(tau - sigma) modulo 2*pi.
PdoaMeasurement extract_eta(const DemodulatedSignal& sig, double delta);

// Range-difference right-hand side d_m - d_1 in meters from one path's eta
// row; pairwise differences are rewrapped to (-pi, pi] before scaling.
std::vector<double> tdoa_rhs(const std::vector<double>& eta_row, double delta);

// Seed for the hyperbolic solve: picks the max-volume triple of baselines,
// runs damped Newton on those three equations from a boresight seed and four
// tilted seeds; the candidate with the smallest full-system residual wins.
Vec3 initial_guess(const std::vector<double>& rhs, const AntennaArray& rx);

// Damped Gauss-Newton on F_m(x) = ||p_m - x|| - ||p_1 - x|| = rhs_m.
// Steps are halved (up to 8 times) until the residual decreases; iteration
// stops when the step norm falls below 1e-9 m or after 50 iterations.
LocateResult gauss_newton_locate(const std::vector<double>& rhs, const AntennaArray& rx,
                                 const Vec3& init);

// Clock gap from an absolute eta row: mean over rx of
// ||p_m - x_hat||/c - eta_m/(2*pi*delta), with eta unwrapped to [0, 2*pi).
double estimate_sigma(const Vec3& x_hat, const std::vector<double>& eta_row,
                      const AntennaArray& rx, double delta);

// Analytic location covariance for i.i.d. per-equation phase noise sigma_z:
// (G^T G)^{-1} * sigma_z^2 * (c / (2*pi*delta))^2, evaluated at x_hat.
std::array<std::array<double, 3>, 3> sync_covariance(const Vec3& x_hat, const AntennaArray& rx,
                                                     double sigma_z, double delta);

// Full synchronization stage: locate both representative antennas on every
// path and average the per-path clock-gap estimates.
SyncEstimate synchronize(const DemodulatedSignal& sig, const AntennaArray& rx, double delta);

}  // namespace mmpos
