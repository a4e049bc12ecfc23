#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "pbg/constants.hpp"
#include "pbg/stack.hpp"

namespace pbg {

enum class DirectionPair { FF, FB, BF, BB };

enum class SchemeKind { scheme1_all_p, scheme2_sp, scheme1_45deg, custom };

// Analyzer basis of a down-converted photon; diag45 is the p+s diagonal.
enum class AnalysisPol { s, p, diag45 };

struct PumpEnvelope {
    enum class Kind { cw, gaussian } kind = Kind::cw;
    double duration_fs = 0.0; // intensity FWHM of the gaussian pulse

    // Spectral amplitude standard deviation of the gaussian pump, rad/s.
    double spectral_sigma() const;
    // E_p(omega) relative to the carrier, = 1 for cw.
    complexd amplitude(double omega, double omega0) const;
};

struct PumpConfig {
    double omega0 = 0.0;            // rad/s
    Polarization pol = Polarization::p;
    double theta = 0.0;             // signed incidence angle, radians
    PumpEnvelope envelope;
};

// Fully determines one physical configuration.
struct SchemeConfig {
    SchemeKind kind = SchemeKind::custom;
    PumpConfig pump;
    AnalysisPol signal_pol = AnalysisPol::p;
    AnalysisPol idler_pol = AnalysisPol::p;
    double theta_s = 0.0;           // signed external signal angle, radians
    double omega_s0 = 0.0;          // rad/s, omega_s0 + omega_i0 = pump omega0
    double omega_i0 = 0.0;
    DirectionPair pair = DirectionPair::FF;

    void validate() const;          // central-frequency sum rule etc.

    static SchemeConfig scheme1_all_p(double omega_p, double theta_s,
                                      DirectionPair pair = DirectionPair::FF);
    static SchemeConfig scheme2_sp(double omega_p, double theta_s,
                                   DirectionPair pair = DirectionPair::FF);
    static SchemeConfig scheme1_45deg(double omega_p, double theta_s,
                                      DirectionPair pair = DirectionPair::FF);
};

struct EmissionGeometry {
    double omega_s = 0.0, omega_i = 0.0; // rad/s
    double theta_s = 0.0, theta_i = 0.0; // signed external angles, radians
    double k_s = 0.0, k_i = 0.0;         // ambient wavenumbers, 1/m
    double transverse_residual = 0.0;    // |ky_s + ky_i - ky_p|, 1/m
};

// Energy and transverse-momentum conservation in the ambient medium.
// Throws EvanescentIdler when |sin theta_i| would exceed 1.
EmissionGeometry idler_geometry(double omega_s, double theta_s, const PumpConfig& pump);

// Analytic integral over one layer of thickness L of e^{i dk z}:
// L e^{i dk L / 2} sinc(dk L / 2).
complexd layer_overlap_integral(complexd dk, double thickness_m);

struct JointSpectralAmplitude {
    enum class Mode { cw_slice, pulsed_grid } mode = Mode::cw_slice;
    std::vector<double> omega_s;           // rad/s, strictly increasing
    std::vector<double> omega_i;           // pulsed_grid only
    std::vector<complexd> amp;             // cw: size ns; pulsed: row-major ns x ni
    std::vector<std::uint8_t> forbidden;   // cw: kinematically forbidden grid points
    SchemeConfig scheme;
    double theta_s = 0.0;

    complexd at(std::size_t is, std::size_t ii) const { return amp[is * omega_i.size() + ii]; }
};

// Pair amplitude along the cw line omega_i = omega_p - omega_s, for a fixed
// signal direction theta_s; the idler direction is the phase-matched one at
// the central frequencies. Grid points whose exact per-frequency kinematics
// are forbidden are zeroed and flagged.
JointSpectralAmplitude jsa_cw(const Multilayer& stack, const SchemeConfig& scheme,
                              std::span<const double> omega_s_grid, double theta_s,
                              const PhysicalConstants& constants);

// Pulsed-pump 2D amplitude E_p(omega_s + omega_i) K(omega_s, omega_i), the cw
// kernel re-evaluated with the pump internal field at each total frequency;
// normalized to unit squared norm over the grid.
JointSpectralAmplitude jsa_pulsed(const Multilayer& stack, const SchemeConfig& scheme,
                                  std::span<const double> omega_s_grid,
                                  std::span<const double> omega_i_grid, double theta_s,
                                  const PhysicalConstants& constants);

struct RateMap {
    std::vector<double> omega_norm;  // 2 omega_s / omega_p0
    std::vector<double> theta;       // radians
    std::vector<double> value;       // row-major theta x omega, >= 0
    bool normalized = true;
};

RateMap generation_rate_map(const Multilayer& stack, const SchemeConfig& scheme,
                            std::span<const double> omega_s_grid,
                            std::span<const double> theta_grid,
                            const PhysicalConstants& constants, bool normalize = true,
                            int threads = 1);

std::map<DirectionPair, JointSpectralAmplitude>
direction_pair_amplitudes(const Multilayer& stack, const SchemeConfig& scheme,
                          std::span<const double> omega_s_grid, double theta_s,
                          const PhysicalConstants& constants);

} // namespace pbg
