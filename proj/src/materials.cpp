#include "pbg/materials.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "pbg/errors.hpp"

namespace pbg {

namespace {

constexpr int X = 0, Y = 1, Z = 2;

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const std::string& path) {
    if (!j.is_object()) throw ConfigInvalid(path + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigInvalid(path + ": unknown key '" + key + "'");
}

int axis_from_char(char c, const std::string& path) {
    switch (c) {
        case 'x': return X;
        case 'y': return Y;
        case 'z': return Z;
        default: throw ConfigInvalid(path + ": bad tensor index '" + std::string(1, c) + "'");
    }
}

} // namespace

double DispersionModel::index_squared(double lambda_um) const {
    if (kind == DispersionKind::constant) return constant_index * constant_index;
    double n2 = offset_a;
    const double l2 = lambda_um * lambda_um;
    for (const auto& t : terms)
        n2 += t.b * l2 / (l2 - t.c_um2);
    return n2;
}

Chi2Tensor Chi2Tensor::wurtzite(double zzz, double zxx, double xxz, double xzx) {
    if (std::isnan(xxz) && std::isnan(xzx))
        throw ConfigInvalid("wurtzite_6mm: at least one of xxz/xzx groups required");
    if (std::isnan(xxz)) xxz = xzx;
    if (std::isnan(xzx)) xzx = xxz;
    Chi2Tensor t;
    t.symmetry_class = Chi2Class::wurtzite_6mm;
    t.entries[{Z, Z, Z}] = zzz;
    t.entries[{Z, X, X}] = zxx;
    t.entries[{Z, Y, Y}] = zxx;
    t.entries[{X, X, Z}] = xxz;
    t.entries[{Y, Y, Z}] = xxz;
    t.entries[{X, Z, X}] = xzx;
    t.entries[{Y, Z, Y}] = xzx;
    return t;
}

Material Material::vacuum() {
    Material m;
    m.name = "vacuum";
    m.dispersion.kind = DispersionKind::constant;
    m.dispersion.constant_index = 1.0;
    m.validity_lo_m = 1e-9;
    m.validity_hi_m = 1.0;
    return m;
}

const Material& MaterialLibrary::find(const std::string& name) const {
    for (const auto& m : materials)
        if (m.name == name) return m;
    throw UnknownMaterial("unknown material '" + name + "'");
}

bool MaterialLibrary::contains(const std::string& name) const {
    for (const auto& m : materials)
        if (m.name == name) return true;
    return false;
}

double refractive_index(const Material& material, double wavelength_m) {
    if (!(wavelength_m >= material.validity_lo_m && wavelength_m <= material.validity_hi_m))
        throw WavelengthOutOfRange("material '" + material.name + "': wavelength " +
                                   std::to_string(wavelength_m * 1e9) + " nm outside validity window");
    const double n2 = material.dispersion.index_squared(wavelength_m * 1e6);
    if (n2 <= 0.0)
        throw NegativeIndexSquared("material '" + material.name + "': n^2 = " +
                                   std::to_string(n2) + " at " +
                                   std::to_string(wavelength_m * 1e9) + " nm");
    return std::sqrt(n2);
}

complexd chi2_coupling_unnormalized(const Chi2Tensor& tensor, const Vec3c& e_pump,
                                    const Vec3c& e_signal, const Vec3c& e_idler) {
    complexd acc = 0.0;
    for (const auto& [idx, value] : tensor.entries)
        acc += value * e_pump[idx[0]] * e_signal[idx[1]] * e_idler[idx[2]];
    return acc;
}

namespace {

double vec_norm(const Vec3c& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

} // namespace

complexd chi2_coupling(const Chi2Tensor& tensor, const Vec3c& e_pump, const Vec3c& e_signal,
                       const Vec3c& e_idler) {
    for (const Vec3c* v : {&e_pump, &e_signal, &e_idler})
        if (std::abs(vec_norm(*v) - 1.0) > 1e-12)
            throw NonUnitVector("chi2_coupling: vector norm deviates from 1 by more than 1e-12");
    return chi2_coupling_unnormalized(tensor, e_pump, e_signal, e_idler);
}

namespace {

DispersionModel parse_dispersion(const nlohmann::json& j, const std::string& path) {
    DispersionModel d;
    const std::string kind = j.value("kind", "");
    if (kind == "constant") {
        require_keys(j, {"kind", "n"}, path);
        if (!j.contains("n")) throw ConfigInvalid(path + ": constant dispersion needs 'n'");
        d.kind = DispersionKind::constant;
        d.constant_index = j.at("n").get<double>();
    } else if (kind == "sellmeier") {
        require_keys(j, {"kind", "A", "terms"}, path);
        d.kind = DispersionKind::sellmeier;
        d.offset_a = j.value("A", 1.0);
        if (!j.contains("terms")) throw ConfigInvalid(path + ": sellmeier dispersion needs 'terms'");
        for (const auto& t : j.at("terms")) {
            if (!t.is_array() || t.size() != 2)
                throw ConfigInvalid(path + ".terms: each term is [B, C_um2]");
            d.terms.push_back({t[0].get<double>(), t[1].get<double>()});
        }
    } else {
        throw ConfigInvalid(path + ".kind: expected 'constant' or 'sellmeier'");
    }
    return d;
}

Chi2Tensor parse_chi2(const nlohmann::json& j, const std::string& path) {
    require_keys(j, {"class", "elements"}, path);
    const std::string cls = j.value("class", "");
    const auto& elements = j.at("elements");
    if (!elements.is_object()) throw ConfigInvalid(path + ".elements: expected an object");

    if (cls == "wurtzite_6mm") {
        double zzz = 0.0, zxx = 0.0;
        double xxz = std::nan(""), xzx = std::nan("");
        for (const auto& [key, value] : elements.items()) {
            if (key.size() != 3) throw ConfigInvalid(path + ".elements: bad key '" + key + "'");
            const double v = value.get<double>();
            if (key == "zzz") zzz = v;
            else if (key == "zxx" || key == "zyy") zxx = v;
            else if (key == "xxz" || key == "yyz") xxz = v;
            else if (key == "xzx" || key == "yzy") xzx = v;
            else throw ConfigInvalid(path + ".elements: '" + key + "' not a wurtzite_6mm element");
        }
        return Chi2Tensor::wurtzite(zzz, zxx, xxz, xzx);
    }
    if (cls == "custom") {
        Chi2Tensor t;
        t.symmetry_class = Chi2Class::custom;
        for (const auto& [key, value] : elements.items()) {
            if (key.size() != 3) throw ConfigInvalid(path + ".elements: bad key '" + key + "'");
            std::array<int, 3> idx{};
            for (int i = 0; i < 3; ++i) idx[i] = axis_from_char(key[i], path + ".elements");
            t.entries[idx] = value.get<double>();
        }
        return t;
    }
    throw ConfigInvalid(path + ".class: expected 'wurtzite_6mm' or 'custom'");
}

} // namespace

MaterialLibrary parse_material_library(const nlohmann::json& j) {
    require_keys(j, {"materials"}, "library");
    if (!j.contains("materials") || !j.at("materials").is_array())
        throw ConfigInvalid("library: 'materials' array required");

    MaterialLibrary lib;
    for (std::size_t i = 0; i < j.at("materials").size(); ++i) {
        const auto& mj = j.at("materials")[i];
        const std::string path = "materials[" + std::to_string(i) + "]";
        require_keys(mj, {"name", "dispersion", "validity_um", "chi2"}, path);
        Material m;
        if (!mj.contains("name")) throw ConfigInvalid(path + ": 'name' required");
        m.name = mj.at("name").get<std::string>();
        if (lib.contains(m.name)) throw ConfigInvalid(path + ": duplicate material '" + m.name + "'");
        if (!mj.contains("dispersion")) throw ConfigInvalid(path + ": 'dispersion' required");
        m.dispersion = parse_dispersion(mj.at("dispersion"), path + ".dispersion");
        if (!mj.contains("validity_um") || !mj.at("validity_um").is_array() ||
            mj.at("validity_um").size() != 2)
            throw ConfigInvalid(path + ": 'validity_um' must be [lo, hi]");
        m.validity_lo_m = mj.at("validity_um")[0].get<double>() * 1e-6;
        m.validity_hi_m = mj.at("validity_um")[1].get<double>() * 1e-6;
        if (!(m.validity_lo_m > 0.0 && m.validity_hi_m > m.validity_lo_m))
            throw ConfigInvalid(path + ".validity_um: window must be positive and increasing");
        if (mj.contains("chi2")) m.chi2 = parse_chi2(mj.at("chi2"), path + ".chi2");

        // physical index over the declared window
        for (int s = 0; s <= 64; ++s) {
            const double lam = m.validity_lo_m +
                               (m.validity_hi_m - m.validity_lo_m) * static_cast<double>(s) / 64.0;
            const double n2 = m.dispersion.index_squared(lam * 1e6);
            if (!(n2 >= 1.0))
                throw ConfigInvalid(path + ": n(lambda) < 1 inside the declared validity window (at " +
                                    std::to_string(lam * 1e9) + " nm)");
        }
        lib.materials.push_back(std::move(m));
    }
    return lib;
}

MaterialLibrary load_material_library(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open material library '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("material library '" + path + "': " + e.what());
    }
    return parse_material_library(j);
}

} // namespace pbg
