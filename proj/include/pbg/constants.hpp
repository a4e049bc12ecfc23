#pragma once

namespace pbg {

// CODATA 2018 values, fixed in one place.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;     // J s
    double epsilon0 = 8.8541878128e-12; // F/m
    double c = 299792458.0;            // m/s
    double beam_area = 1.0e-8;         // m^2, transverse profile area of the interacting beams

    // Overall scale factor of the pair amplitude; constant for a given
    // pair of central frequencies, so it only sets the overall scale.
    double pair_prefactor(double omega_s0, double omega_i0) const;
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Vacuum angular frequency <-> vacuum wavelength.
inline double omega_from_wavelength(double lambda_m) { return two_pi * 299792458.0 / lambda_m; }
inline double wavelength_from_omega(double omega) { return two_pi * 299792458.0 / omega; }

} // namespace pbg
