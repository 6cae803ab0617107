#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mmpos/geometry.hpp"
#include "mmpos/signal.hpp"

namespace mmpos {

// Regular voxel grid; voxel (i,j,k) is centered at origin + pitch*(i,j,k).
struct GridSpec {
    Vec3 origin;
    double pitch = 0.05;
    std::size_t nx = 1, ny = 1, nz = 1;

    Vec3 voxel_center(std::size_t i, std::size_t j, std::size_t k) const {
        return {origin.x + pitch * static_cast<double>(i),
                origin.y + pitch * static_cast<double>(j),
                origin.z + pitch * static_cast<double>(k)};
    }
    std::size_t size() const { return nx * ny * nz; }
};

struct VoxelImage {
    GridSpec grid;
    std::vector<std::complex<double>> continuous;  // raw reconstruction, [x][y][z]
    std::vector<std::uint8_t> binary;              // filled by threshold_image
    double nu = 0.0;

    std::complex<double>& at(std::size_t i, std::size_t j, std::size_t k) {
        return continuous[(i * grid.ny + j) * grid.nz + k];
    }
    const std::complex<double>& at(std::size_t i, std::size_t j, std::size_t k) const {
        return continuous[(i * grid.ny + j) * grid.nz + k];
    }
    double max_magnitude() const;
    // Voxel centers of the occupied (binary) cells.
    std::vector<Vec3> occupied_points() const;
};

// One path's rx-by-frequency phasor slab, plus the aperture it was measured on.
struct PathSignal {
    std::vector<std::complex<double>> phasors;  // [rx][freq]
    std::size_t num_rx = 0;
    std::size_t num_freq = 0;

    std::complex<double>& at(std::size_t m, std::size_t k) { return phasors[m * num_freq + k]; }
    const std::complex<double>& at(std::size_t m, std::size_t k) const {
        return phasors[m * num_freq + k];
    }
};

// Extracts path ell of a demodulated tensor as a standalone slab.
PathSignal extract_path(const DemodulatedSignal& sig, std::size_t ell);

// Shifts the demodulation clock reference to sigma_hat: multiplies every
// tone-k entry by exp(-j*2*pi*f_k*(sigma_hat - sigma_tilde_used)).
void resync_phasors(DemodulatedSignal& sig, const SfcwSpec& spec, double sigma_hat);

// Complex linear interpolation of a spectrum column from a strictly
// increasing irregular axis onto arbitrary targets; out-of-range -> 0.
std::vector<std::complex<double>> stolt_resample(const std::vector<double>& axis_in,
                                                 const std::vector<std::complex<double>>& values,
                                                 const std::vector<double>& axis_out);

// Plane-wave-decomposition reconstruction of one path onto the grid:
// per-tone 2D aperture DFT, reflection-coefficient removal, aperture-plane
// reference phase, resampling of the depth frequency onto a uniform axis,
// and inverse DFT evaluated on the voxel centers.  The spectral window
// adapts to the directions subtended by the grid, so targets beyond the
// aperture's alias-free cone remain reachable (their replicas are used).
VoxelImage reconstruct_image(const PathSignal& sig, const AntennaArray& rx, const SfcwSpec& spec,
                             std::complex<double> gamma, const GridSpec& grid);

// Matched-filter reference: correlate with exp(+j*2*pi*f_k*||x - p_m||/c).
VoxelImage backprojection_oracle(const PathSignal& sig, const AntennaArray& rx,
                                 const SfcwSpec& spec, const GridSpec& grid);

// Binary occupancy: |I| / max|I| >= nu.
void threshold_image(VoxelImage& img, double nu);

// Cross-range resolution approximation c*sqrt(R^2+D^2)/(2*f_c*D).
double azimuth_resolution(double f_center, double aperture_size, double range);

// Depth resolution c/(f_last - f1).
double range_resolution(double f1, double f_last);

struct SamplingReport {
    double spacing_limit = 0.0;  // c/(2*f_c)
    double spacing_actual = 0.0;
    bool spacing_ok = false;
    double delta_limit = 0.0;  // c/R_max
    double delta_actual = 0.0;
    bool delta_ok = false;
    std::vector<std::string> warnings;
};

// Aperture-spacing and frequency-gap sampling rules; violations warn.
SamplingReport check_sampling(double dx, double dy, double f_center, double delta, double r_max);

}  // namespace mmpos
