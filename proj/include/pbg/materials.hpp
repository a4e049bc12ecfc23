#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace pbg {

using complexd = std::complex<double>;
using Vec3c = std::array<complexd, 3>;

enum class DispersionKind { constant, sellmeier };

struct SellmeierTerm {
    double b = 0.0;      // dimensionless
    double c_um2 = 0.0;  // squared micrometers
};

// n^2(lambda) = A + sum_i B_i lambda^2 / (lambda^2 - C_i), lambda in micrometers.
struct DispersionModel {
    DispersionKind kind = DispersionKind::constant;
    double constant_index = 1.0;
    double offset_a = 1.0;
    std::vector<SellmeierTerm> terms;

    double index_squared(double lambda_um) const;
};

enum class Chi2Class { wurtzite_6mm, custom };

// Sparse second-order susceptibility. Index triple (j,k,l): j contracts with
// the pump polarization, k with the signal, l with the idler. Values in pm/V.
struct Chi2Tensor {
    Chi2Class symmetry_class = Chi2Class::custom;
    std::map<std::array<int, 3>, double> entries;

    bool empty() const { return entries.empty(); }

    // Fills {zzz, zxx=zyy, xxz=yyz, xzx=yzy}. Passing nan for one of the last
    // two mirrors it from the other.
    static Chi2Tensor wurtzite(double zzz, double zxx, double xxz, double xzx);
};

struct Material {
    std::string name;
    DispersionModel dispersion;
    Chi2Tensor chi2;                 // empty map -> linear material
    double validity_lo_m = 0.0;      // wavelength window, meters
    double validity_hi_m = 0.0;

    bool nonlinear() const { return !chi2.empty(); }
    static Material vacuum();
};

struct MaterialLibrary {
    std::vector<Material> materials;

    const Material& find(const std::string& name) const;
    bool contains(const std::string& name) const;
};

// n(lambda) for a vacuum wavelength in meters. Throws WavelengthOutOfRange
// outside the validity window, NegativeIndexSquared in a pole region.
double refractive_index(const Material& material, double wavelength_m);

// Full contraction sum_{jkl} chi_{jkl} (e_p)_j (e_s)_k (e_i)_l in pm/V.
// Checks that all three vectors have unit norm within 1e-12.
complexd chi2_coupling(const Chi2Tensor& tensor, const Vec3c& e_pump, const Vec3c& e_signal,
                       const Vec3c& e_idler);

// Same contraction without the unit-norm check; used for field expansions
// where the component vectors are not normalized.
complexd chi2_coupling_unnormalized(const Chi2Tensor& tensor, const Vec3c& e_pump,
                                    const Vec3c& e_signal, const Vec3c& e_idler);

// Strict JSON loading; unknown keys are rejected with a field path.
MaterialLibrary parse_material_library(const nlohmann::json& j);
MaterialLibrary load_material_library(const std::string& path);

} // namespace pbg
