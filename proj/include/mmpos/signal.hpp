#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mmpos/geometry.hpp"

namespace mmpos {

// Stepped-frequency probe: K tones f1, f1+delta, ..., f1+(K-1)*delta.
struct SfcwSpec {
    double f1 = 57.0e9;
    std::size_t K = 512;
    double delta = 5.86e6;

    double freq(std::size_t k) const { return f1 + static_cast<double>(k) * delta; }
    double f_last() const { return freq(K - 1); }
    double f_center() const { return 0.5 * (f1 + f_last()); }
    void validate() const;
};

// Two-tone signature waveforms for the representative antennas: antenna a
// transmits tones (f_a, f_a+delta), antenna b transmits (f_b, f_b+delta).
// All four tones must sit strictly below the probe band.
struct SwSpec {
    double f_a = 0.0;
    double f_b = 0.0;
    double delta = 5.86e6;

    void validate(const SfcwSpec& sfcw) const;
};

// Demodulated complex phasors for every path.  Layouts are dense row-major:
// sfcw is [path][rx][freq]; sw_alpha / sw_beta are [path][rx][tone] with two
// tones each.  sigma_tilde_used records the demodulation clock reference.
struct DemodulatedSignal {
    std::size_t num_paths = 0;
    std::size_t num_rx = 0;
    std::size_t num_freq = 0;
    std::vector<std::complex<double>> sfcw;
    std::vector<std::complex<double>> sw_alpha;
    std::vector<std::complex<double>> sw_beta;
    double sigma_tilde_used = 0.0;

    std::complex<double>& at(std::size_t ell, std::size_t m, std::size_t k) {
        return sfcw[(ell * num_rx + m) * num_freq + k];
    }
    const std::complex<double>& at(std::size_t ell, std::size_t m, std::size_t k) const {
        return sfcw[(ell * num_rx + m) * num_freq + k];
    }
    std::complex<double>& alpha(std::size_t ell, std::size_t m, std::size_t tone) {
        return sw_alpha[(ell * num_rx + m) * 2 + tone];
    }
    const std::complex<double>& alpha(std::size_t ell, std::size_t m, std::size_t tone) const {
        return sw_alpha[(ell * num_rx + m) * 2 + tone];
    }
    std::complex<double>& beta(std::size_t ell, std::size_t m, std::size_t tone) {
        return sw_beta[(ell * num_rx + m) * 2 + tone];
    }
    const std::complex<double>& beta(std::size_t ell, std::size_t m, std::size_t tone) const {
        return sw_beta[(ell * num_rx + m) * 2 + tone];
    }
};

// Per-path stepped-frequency phasors: for each path, rx m, and tone k the
// entry is Gamma * sum over TV antennas of exp(j*2*pi*f_k*(sigma - sigma_tilde - tau)).
DemodulatedSignal simulate_sfcw(const Scenario& scn, const SfcwSpec& spec, double sigma_tilde);

// Fills the two-tone signature phasors of the representative antennas into sig.
void simulate_sw(const Scenario& scn, const SwSpec& spec, DemodulatedSignal& sig);

// Multiplies every complex entry by exp(j*eps) with eps ~ N(0, sigma_z^2),
// i.i.d. per entry, drawn from the counter-based stream for `seed`.
void add_phase_noise(DemodulatedSignal& sig, double sigma_z, std::uint64_t seed);

// Small-noise phase jitter equivalent of an SNR on a unit phasor.
double snr_to_phase_std(double snr_db);

}  // namespace mmpos
