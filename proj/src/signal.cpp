#include "mmpos/signal.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "mmpos/rng.hpp"

namespace mmpos {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> cis(double phase) {
    return {std::cos(phase), std::sin(phase)};
}

std::complex<double> path_gamma(const MirrorPlane* plane) {
    return plane ? plane->gamma : std::complex<double>{1.0, 0.0};
}
}  // namespace

void SfcwSpec::validate() const {
    if (f1 <= 0.0) throw std::invalid_argument("sfcw: f1 must be positive");
    if (K < 2) throw std::invalid_argument("sfcw: need at least two tones");
    if (delta <= 0.0) throw std::invalid_argument("sfcw: delta must be positive");
}

void SwSpec::validate(const SfcwSpec& sfcw) const {
    if (!(f_a > 0.0 && f_a < f_a + delta && f_a + delta < f_b && f_b < f_b + delta &&
          f_b + delta < sfcw.f1)) {
        throw std::invalid_argument("SW bands overlap SFCW");
    }
}

DemodulatedSignal simulate_sfcw(const Scenario& scn, const SfcwSpec& spec, double sigma_tilde) {
    spec.validate();
    DemodulatedSignal sig;
    sig.num_paths = scn.num_paths();
    sig.num_rx = scn.sv.points.size();
    sig.num_freq = spec.K;
    sig.sigma_tilde_used = sigma_tilde;
    sig.sfcw.assign(sig.num_paths * sig.num_rx * sig.num_freq, {0.0, 0.0});
    sig.sw_alpha.assign(sig.num_paths * sig.num_rx * 2, {0.0, 0.0});
    sig.sw_beta.assign(sig.num_paths * sig.num_rx * 2, {0.0, 0.0});

    for (std::size_t ell = 0; ell < sig.num_paths; ++ell) {
        const MirrorPlane* plane = scn.mirror_for_path(ell);
        const std::complex<double> gamma = path_gamma(plane);
        // Mirrored sources turn the specular path into a straight line.
        std::vector<Vec3> sources;
        sources.reserve(scn.tv.points.size());
        for (const Vec3& tx : scn.tv.points)
            sources.push_back(plane ? reflect_point(tx, *plane) : tx);
        std::vector<std::complex<double>> col(spec.K);
        for (std::size_t m = 0; m < sig.num_rx; ++m) {
            const Vec3& rx = scn.sv.points[m];
            std::fill(col.begin(), col.end(), std::complex<double>{0.0, 0.0});
            for (const Vec3& src : sources) {
                const double arg = scn.sigma - sigma_tilde - distance(src, rx) / kSpeedOfLight;
                // Tone k phase advances geometrically: phase(k) = 2*pi*(f1 + k*delta)*arg.
                const std::complex<double> step = cis(kTwoPi * spec.delta * arg);
                std::complex<double> cur = cis(kTwoPi * spec.f1 * arg);
                for (std::size_t k = 0; k < spec.K; ++k) {
                    col[k] += cur;
                    cur *= step;
                }
            }
            for (std::size_t k = 0; k < spec.K; ++k) sig.at(ell, m, k) = gamma * col[k];
        }
    }
    return sig;
}

void simulate_sw(const Scenario& scn, const SwSpec& spec, DemodulatedSignal& sig) {
    for (std::size_t ell = 0; ell < sig.num_paths; ++ell) {
        const MirrorPlane* plane = scn.mirror_for_path(ell);
        const std::complex<double> gamma = path_gamma(plane);
        for (std::size_t m = 0; m < sig.num_rx; ++m) {
            const Vec3& rx = scn.sv.points[m];
            const double tau_a = path_delay(scn.rep_a(), rx, plane);
            const double tau_b = path_delay(scn.rep_b(), rx, plane);
            for (std::size_t tone = 0; tone < 2; ++tone) {
                const double fa = spec.f_a + static_cast<double>(tone) * spec.delta;
                const double fb = spec.f_b + static_cast<double>(tone) * spec.delta;
                sig.alpha(ell, m, tone) = gamma * cis(kTwoPi * fa * (scn.sigma - tau_a));
                sig.beta(ell, m, tone) = gamma * cis(kTwoPi * fb * (scn.sigma - tau_b));
            }
        }
    }
}

void add_phase_noise(DemodulatedSignal& sig, double sigma_z, std::uint64_t seed) {
    if (sigma_z < 0.0) throw std::invalid_argument("phase noise std must be non-negative");
    if (sigma_z == 0.0) return;
    // Disjoint counter ranges keep every entry's draw independent of layout.
    std::uint64_t index = 0;
    const auto jitter = [&](std::vector<std::complex<double>>& v) {
        for (auto& c : v) c *= cis(sigma_z * rng::normal(seed, index++));
    };
    jitter(sig.sfcw);
    jitter(sig.sw_alpha);
    jitter(sig.sw_beta);
}

double snr_to_phase_std(double snr_db) {
    return std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0));
}

}  // namespace mmpos
