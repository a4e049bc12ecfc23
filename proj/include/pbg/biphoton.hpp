#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pbg/spdc.hpp"

namespace pbg {

struct AntisymProfile {
    std::vector<double> detuning;        // rad/s, symmetric about 0
    std::vector<complexd> f;             // slice values phi(omega_s0 + detuning)
    std::vector<complexd> antisym;       // f(d) - f(-d)
    double omega_s0 = 0.0, omega_i0 = 0.0;
    double antisymmetry_fraction = 0.0;  // odd-part norm share in [0, 1]
};

// Odd/even split of a cw slice about the degenerate point. The slice grid
// must be symmetric about omega_p0/2 (AsymmetricGrid otherwise).
AntisymProfile antisym_decompose(const JointSpectralAmplitude& jsa);

// Assemble a profile from raw detuning samples (synthetic inputs, tests).
AntisymProfile make_profile(std::span<const double> detuning, std::span<const complexd> f,
                            double omega_s0, double omega_i0);

struct GFunction {
    std::vector<double> tau;      // s
    std::vector<complexd> g;
    complexd g0;                  // g(0), real and >= 0 up to roundoff
};

// g(tau) = int d omega |f(omega) - f(-omega)|^2 e^{-2 i omega tau}, trapezoid
// quadrature on the stored detuning grid; omega is the detuning from the
// signal central frequency.
GFunction g_function(const AntisymProfile& profile, std::span<const double> tau_grid);

struct HOMTrace {
    std::vector<double> tau;      // s
    std::vector<double> rn;
    double tail_tolerance = 0.02; // expected |R_n - 1| at the grid extremes
};

// Normalized coincidence-count rate
// R_n(tau_l) = 1 + Re[e^{-i(omega_s0 - omega_i0) tau_l} g(tau_l)] / g(0).
HOMTrace hom_rate(const AntisymProfile& profile, std::span<const double> tau_grid);

// Direct two-photon interference integral over the slice; valid for states
// that are not purely antisymmetric. Reduces to hom_rate for odd slices.
HOMTrace hom_rate_general(const JointSpectralAmplitude& jsa, std::span<const double> tau_grid);
HOMTrace hom_rate_general(const AntisymProfile& profile, std::span<const double> tau_grid);

struct TemporalAmplitude {
    bool cw_cut = false;          // true: a is the 1D envelope in tau_s - tau_i
    std::vector<double> tau_s;    // s (for cw_cut, the difference-time grid)
    std::vector<double> tau_i;
    std::vector<complexd> a;      // cw: size n; pulsed: row-major tau_s x tau_i
    double omega_s0 = 0.0, omega_i0 = 0.0;
    double freq_norm_sq = 0.0;    // squared norm of the producing amplitude
    double time_norm_sq = 0.0;

    complexd at(std::size_t is, std::size_t ii) const;
};

// Discrete Fourier transform of the amplitude with the carrier phases
// e^{-i omega_s0 tau_s} e^{-i omega_i0 tau_i} factored out. The time grid is
// the DFT dual of the (uniform) frequency grid, so Parseval holds exactly.
TemporalAmplitude temporal_amplitude(const JointSpectralAmplitude& jsa);

struct ConditionalDetection {
    std::vector<double> tau_i;    // s
    std::vector<double> p;        // probability density, 1/s
    double tau_s = 0.0;
};

// p_i(tau_i) = |A(tau_s, tau_i)|^2 normalized to unit trapezoid integral.
ConditionalDetection conditional_detection(const TemporalAmplitude& amplitude, double tau_s);

} // namespace pbg
