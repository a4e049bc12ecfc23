#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbg/materials.hpp"

namespace pbg {

enum class Polarization { s, p };

struct Layer {
    Material material;
    double thickness_m = 0.0;
};

// 1D multilayer along z; layer 0 starts at z = 0, light is incident from the
// left ambient. Materials are embedded by value so solvers need no library.
struct Multilayer {
    Material ambient_left = Material::vacuum();
    Material ambient_right = Material::vacuum();
    std::vector<Layer> layers;

    double total_length() const;
};

// Structure description: either an explicit layer list or a periodic
// shorthand {period, repeats, cap}. Validates against the library.
Multilayer build_stack(const nlohmann::json& spec, const MaterialLibrary& lib);
Multilayer load_stack(const std::string& path, const MaterialLibrary& lib);

// Per-medium plane-wave data at a fixed (omega, transverse wavenumber).
struct LayerWave {
    double n = 1.0;             // refractive index at this omega
    double k = 0.0;             // n * omega / c
    complexd kz;                // longitudinal wavenumber, Im >= 0 branch
    complexd cos_int;           // kz / k
    complexd sin_int;           // ky / k (signed)
    bool evanescent = false;
};

struct PlaneWaveContext {
    double omega = 0.0;         // rad/s
    double theta_ext = 0.0;     // signed external angle in the left ambient, radians
    Polarization pol = Polarization::s;
    double ky = 0.0;            // conserved transverse wavenumber, 1/m
    std::vector<LayerWave> media; // [ambient_left, layers..., ambient_right]
};

PlaneWaveContext make_context(const Multilayer& stack, double omega, double theta_ext,
                              Polarization pol);

struct Matrix2c {
    complexd m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    Matrix2c operator*(const Matrix2c& rhs) const;
    Matrix2c inverse() const;
    complexd det() const { return m11 * m22 - m12 * m21; }
};

// Relates (forward, backward) amplitudes at the right facet to those at the
// left facet: (A_R, B_R)^T = M (A_L, B_L)^T. Time convention e^{-i omega t},
// forward = +z, p-amplitudes are electric-field amplitudes with unit vector
// x_hat x k_hat.
Matrix2c transfer_matrix(const Multilayer& stack, const PlaneWaveContext& ctx);

struct Transmittance {
    complexd r, t;
    double R = 0.0, T = 0.0;
    bool evanescent_inside = false;
};

// Amplitude and power coefficients for a unit wave incident from the left.
Transmittance transmittance(const Multilayer& stack, const PlaneWaveContext& ctx);

enum class Incidence { from_left, from_right };
enum class BoundaryKind { unit_incident, unit_outgoing };

struct FieldDistribution {
    struct Amps {
        complexd forward, backward; // referenced to the medium's left boundary
    };
    PlaneWaveContext ctx;
    std::vector<Amps> media;        // same indexing as ctx.media
    complexd incoming_left, outgoing_left, incoming_right, outgoing_right;
};

// unit_incident: unit wave enters at the selected facet.
// unit_outgoing: the only outgoing wave is at the selected facet, with unit
// amplitude (time reverse of the corresponding unit_incident solution).
FieldDistribution internal_fields(const Multilayer& stack, const PlaneWaveContext& ctx,
                                  Incidence incidence, BoundaryKind boundary);

// Polarization unit vector of a plane-wave component in medium `index`.
// direction +1 = forward, -1 = backward. s waves: x_hat; p waves: x_hat x k_hat.
Vec3c polarization_vector(const PlaneWaveContext& ctx, std::size_t index, int direction);

// Normalized z-directed power flux of the two-wave field in medium `index`,
// evaluated at the medium's left reference plane. Units are arbitrary but
// consistent across media of one context.
double flux_z(const PlaneWaveContext& ctx, std::size_t index, const FieldDistribution::Amps& a);

struct SpectralCurve {
    std::vector<double> x; // strictly increasing, dimensionless (2 omega / omega_ref)
    std::vector<double> y;
};

SpectralCurve transmission_spectrum(const Multilayer& stack, std::span<const double> omega_grid,
                                    double theta_ext, Polarization pol, double omega_ref);

struct Peak {
    double position = 0.0;
    double height = 0.0;
    double width = 0.0; // full width at half prominence
};

// Local maxima with prominence >= min_prominence, sorted by position.
std::vector<Peak> find_transmission_peaks(const SpectralCurve& curve, double min_prominence);

} // namespace pbg
