#include "pbg/stack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pbg/constants.hpp"
#include "pbg/errors.hpp"
#include "pbg/grid.hpp"

namespace pbg {

namespace {

constexpr complexd I{0.0, 1.0};

void require_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                  const std::string& path) {
    if (!j.is_object()) throw ConfigInvalid(path + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigInvalid(path + ": unknown key '" + key + "'");
}

Layer parse_layer(const nlohmann::json& j, const MaterialLibrary& lib, const std::string& path) {
    require_keys(j, {"material", "thickness_nm"}, path);
    if (!j.contains("material") || !j.contains("thickness_nm"))
        throw ConfigInvalid(path + ": 'material' and 'thickness_nm' required");
    const std::string name = j.at("material").get<std::string>();
    if (!lib.contains(name)) throw UnknownMaterial(path + ": unknown material '" + name + "'");
    const double t_nm = j.at("thickness_nm").get<double>();
    if (!(t_nm > 0.0))
        throw NonPositiveThickness(path + ": thickness " + std::to_string(t_nm) + " nm");
    return Layer{lib.find(name), t_nm * 1e-9};
}

// Continuity rows for the two tangential field components, as functions of
// the (forward, backward) amplitudes of one medium.
Matrix2c tangential_map(const LayerWave& lw, Polarization pol) {
    if (pol == Polarization::s) {
        // E_x = A + B ; H_y ~ kz (A - B)
        return Matrix2c{1.0, 1.0, lw.kz, -lw.kz};
    }
    // p: E_y = -cos A + cos B ; H_x ~ n (A + B)
    return Matrix2c{-lw.cos_int, lw.cos_int, complexd(lw.n), complexd(lw.n)};
}

Matrix2c propagation(const LayerWave& lw, double thickness) {
    const complexd ph = std::exp(I * lw.kz * thickness);
    return Matrix2c{ph, 0.0, 0.0, 1.0 / ph};
}

} // namespace

double Multilayer::total_length() const {
    double s = 0.0;
    for (const auto& l : layers) s += l.thickness_m;
    return s;
}

Multilayer build_stack(const nlohmann::json& spec, const MaterialLibrary& lib) {
    require_keys(spec, {"ambient_left", "ambient_right", "layers", "period", "repeats", "cap"},
                 "structure");
    Multilayer stack;
    if (spec.contains("ambient_left")) {
        const std::string name = spec.at("ambient_left").get<std::string>();
        if (!lib.contains(name)) throw UnknownMaterial("structure.ambient_left: '" + name + "'");
        stack.ambient_left = lib.find(name);
    }
    if (spec.contains("ambient_right")) {
        const std::string name = spec.at("ambient_right").get<std::string>();
        if (!lib.contains(name)) throw UnknownMaterial("structure.ambient_right: '" + name + "'");
        stack.ambient_right = lib.find(name);
    }

    if (spec.contains("layers")) {
        if (spec.contains("period") || spec.contains("repeats") || spec.contains("cap"))
            throw ConfigInvalid("structure: give either 'layers' or the periodic shorthand");
        std::size_t i = 0;
        for (const auto& lj : spec.at("layers"))
            stack.layers.push_back(parse_layer(lj, lib, "structure.layers[" + std::to_string(i++) + "]"));
    } else if (spec.contains("period")) {
        if (!spec.contains("repeats")) throw ConfigInvalid("structure: 'repeats' required with 'period'");
        std::vector<Layer> period;
        std::size_t i = 0;
        for (const auto& lj : spec.at("period"))
            period.push_back(parse_layer(lj, lib, "structure.period[" + std::to_string(i++) + "]"));
        if (period.empty()) throw EmptyStack("structure.period: empty");
        const auto repeats = spec.at("repeats").get<long>();
        if (repeats < 0) throw ConfigInvalid("structure.repeats: negative");
        for (long r = 0; r < repeats; ++r)
            stack.layers.insert(stack.layers.end(), period.begin(), period.end());
        if (spec.contains("cap")) {
            i = 0;
            for (const auto& lj : spec.at("cap"))
                stack.layers.push_back(parse_layer(lj, lib, "structure.cap[" + std::to_string(i++) + "]"));
        }
    } else {
        throw ConfigInvalid("structure: 'layers' or 'period' required");
    }

    if (stack.layers.empty()) throw EmptyStack("structure has no layers");
    return stack;
}

Multilayer load_stack(const std::string& path, const MaterialLibrary& lib) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open structure file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("structure '" + path + "': " + e.what());
    }
    return build_stack(j, lib);
}

PlaneWaveContext make_context(const Multilayer& stack, double omega, double theta_ext,
                              Polarization pol) {
    PlaneWaveContext ctx;
    ctx.omega = omega;
    ctx.theta_ext = theta_ext;
    ctx.pol = pol;

    const double lambda = wavelength_from_omega(omega);
    const double c = 299792458.0;

    auto wave_of = [&](const Material& m) {
        LayerWave lw;
        lw.n = refractive_index(m, lambda);
        lw.k = lw.n * omega / c;
        return lw;
    };

    ctx.media.reserve(stack.layers.size() + 2);
    ctx.media.push_back(wave_of(stack.ambient_left));
    for (const auto& l : stack.layers) ctx.media.push_back(wave_of(l.material));
    ctx.media.push_back(wave_of(stack.ambient_right));

    ctx.ky = ctx.media.front().k * std::sin(theta_ext);
    for (auto& lw : ctx.media) {
        const double kz2 = lw.k * lw.k - ctx.ky * ctx.ky;
        if (kz2 >= 0.0) {
            lw.kz = std::sqrt(kz2);
            lw.evanescent = false;
        } else {
            lw.kz = complexd(0.0, std::sqrt(-kz2)); // Im >= 0 branch
            lw.evanescent = true;
        }
        lw.cos_int = lw.kz / lw.k;
        lw.sin_int = complexd(ctx.ky / lw.k);
    }
    return ctx;
}

Matrix2c Matrix2c::operator*(const Matrix2c& rhs) const {
    return Matrix2c{m11 * rhs.m11 + m12 * rhs.m21, m11 * rhs.m12 + m12 * rhs.m22,
                    m21 * rhs.m11 + m22 * rhs.m21, m21 * rhs.m12 + m22 * rhs.m22};
}

Matrix2c Matrix2c::inverse() const {
    const complexd d = det();
    if (d == complexd(0.0))
        throw SingularScattering("2x2 tangential map is singular");
    return Matrix2c{m22 / d, -m12 / d, -m21 / d, m11 / d};
}

Matrix2c transfer_matrix(const Multilayer& stack, const PlaneWaveContext& ctx) {
    const std::size_t n_layers = ctx.media.size() - 2;
    Matrix2c t = tangential_map(ctx.media[1], ctx.pol).inverse() *
                 tangential_map(ctx.media[0], ctx.pol);
    for (std::size_t l = 1; l <= n_layers; ++l) {
        const Matrix2c p = propagation(ctx.media[l], stack.layers[l - 1].thickness_m);
        t = tangential_map(ctx.media[l + 1], ctx.pol).inverse() *
            (tangential_map(ctx.media[l], ctx.pol) * (p * t));
    }
    return t;
}

namespace {

// z-directed flux factor of a unit forward wave in a lossless ambient.
double ambient_flux_factor(const LayerWave& lw) { return lw.n * std::real(lw.cos_int); }

// Unit-incident-from-left solve by reflectance-ratio recursion: backward
// sweep of rho = B/A, forward sweep of the decaying amplitude. Stable through
// deeply evanescent regions where composing transfer matrices is not.
struct UnitIncidentSolution {
    std::vector<FieldDistribution::Amps> left_ref;   // per medium, left-boundary reference
    std::vector<FieldDistribution::Amps> right_edge; // values at each medium's right edge
};

UnitIncidentSolution solve_from_left(const PlaneWaveContext& ctx,
                                     const std::vector<double>& thickness) {
    const std::size_t m = ctx.media.size();
    std::vector<complexd> rho_left(m), rho_right(m);
    std::vector<Matrix2c> jmap(m - 1);

    rho_left[m - 1] = 0.0; // nothing incoming from the right
    for (std::size_t i = m - 1; i-- > 0;) {
        jmap[i] = tangential_map(ctx.media[i + 1], ctx.pol).inverse() *
                  tangential_map(ctx.media[i], ctx.pol);
        const Matrix2c& j = jmap[i];
        const complexd den = rho_left[i + 1] * j.m12 - j.m22;
        if (std::abs(den) == 0.0)
            throw SingularScattering("interface reflectance recursion is singular");
        rho_right[i] = (j.m21 - rho_left[i + 1] * j.m11) / den;
        const complexd ph = std::exp(I * ctx.media[i].kz * thickness[i]);
        rho_left[i] = rho_right[i] * ph * ph;
    }

    UnitIncidentSolution sol;
    sol.left_ref.resize(m);
    sol.right_edge.resize(m);
    sol.left_ref[0] = {1.0, rho_left[0]};
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const complexd ph = std::exp(I * ctx.media[i].kz * thickness[i]);
        const complexd a_r = sol.left_ref[i].forward * ph;
        const complexd b_r = rho_right[i] * a_r;
        sol.right_edge[i] = {a_r, b_r};
        const Matrix2c& j = jmap[i];
        const complexd a_next = j.m11 * a_r + j.m12 * b_r;
        sol.left_ref[i + 1] = {a_next, rho_left[i + 1] * a_next};
    }
    sol.right_edge[m - 1] = sol.left_ref[m - 1];
    return sol;
}

std::vector<double> thickness_per_medium(const Multilayer& stack) {
    std::vector<double> d(stack.layers.size() + 2, 0.0);
    for (std::size_t l = 0; l < stack.layers.size(); ++l) d[l + 1] = stack.layers[l].thickness_m;
    return d;
}

PlaneWaveContext reversed_context(const PlaneWaveContext& ctx) {
    PlaneWaveContext rev = ctx;
    std::reverse(rev.media.begin(), rev.media.end());
    return rev;
}

} // namespace

Transmittance transmittance(const Multilayer& stack, const PlaneWaveContext& ctx) {
    const auto sol = solve_from_left(ctx, thickness_per_medium(stack));
    Transmittance out;
    out.r = sol.left_ref.front().backward;
    out.t = sol.left_ref.back().forward;
    out.R = std::norm(out.r);
    const double f_in = ambient_flux_factor(ctx.media.front());
    const double f_out = ambient_flux_factor(ctx.media.back());
    out.T = std::norm(out.t) * (f_in > 0.0 ? f_out / f_in : 0.0);
    for (std::size_t l = 1; l + 1 < ctx.media.size(); ++l)
        out.evanescent_inside |= ctx.media[l].evanescent;
    return out;
}

FieldDistribution internal_fields(const Multilayer& stack, const PlaneWaveContext& ctx,
                                  Incidence incidence, BoundaryKind boundary) {
    FieldDistribution fd;
    fd.ctx = ctx;
    const std::size_t m = ctx.media.size();
    fd.media.resize(m);

    const auto thickness = thickness_per_medium(stack);
    if (incidence == Incidence::from_left) {
        fd.media = solve_from_left(ctx, thickness).left_ref;
    } else {
        // solve the mirrored problem, then map right-edge values back:
        // F(z') = A'^r e^{-i kz z'} + B'^r e^{+i kz z'}
        auto rev_thickness = thickness;
        std::reverse(rev_thickness.begin(), rev_thickness.end());
        const auto sol = solve_from_left(reversed_context(ctx), rev_thickness);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& edge = sol.right_edge[m - 1 - i];
            fd.media[i] = {edge.backward, edge.forward};
        }
    }

    if (boundary == BoundaryKind::unit_outgoing) {
        const std::size_t exit_medium =
            incidence == Incidence::from_left ? 0 : ctx.media.size() - 1;
        if (ctx.media[exit_medium].evanescent)
            throw Error("internal_fields: no propagating outgoing wave at the selected facet");
        // time reverse; purely evanescent media conjugate in place
        for (std::size_t l = 0; l < fd.media.size(); ++l) {
            auto& a = fd.media[l];
            if (ctx.media[l].evanescent)
                a = {std::conj(a.forward), std::conj(a.backward)};
            else
                a = {std::conj(a.backward), std::conj(a.forward)};
        }
    }

    fd.incoming_left = fd.media.front().forward;
    fd.outgoing_left = fd.media.front().backward;
    fd.outgoing_right = fd.media.back().forward;
    fd.incoming_right = fd.media.back().backward;
    return fd;
}

Vec3c polarization_vector(const PlaneWaveContext& ctx, std::size_t index, int direction) {
    if (ctx.pol == Polarization::s) return Vec3c{1.0, 0.0, 0.0};
    const auto& lw = ctx.media[index];
    // x_hat x k_hat with k_hat = (0, sin, +-cos)
    if (direction >= 0) return Vec3c{0.0, -lw.cos_int, lw.sin_int};
    return Vec3c{0.0, lw.cos_int, lw.sin_int};
}

double flux_z(const PlaneWaveContext& ctx, std::size_t index, const FieldDistribution::Amps& a) {
    const auto& lw = ctx.media[index];
    if (ctx.pol == Polarization::s) {
        // Re[E_x conj(H_y)] with H_y ~ kz (A - B)
        return std::real((a.forward + a.backward) * std::conj(lw.kz * (a.forward - a.backward)));
    }
    // -Re[E_y conj(H_x)] with E_y = cos (B - A), H_x ~ n (A + B)
    return std::real(complexd(lw.n) * lw.cos_int * (a.forward - a.backward) *
                     std::conj(a.forward + a.backward));
}

SpectralCurve transmission_spectrum(const Multilayer& stack, std::span<const double> omega_grid,
                                    double theta_ext, Polarization pol, double omega_ref) {
    if (omega_grid.empty()) throw Error("transmission_spectrum: empty grid");
    if (!strictly_increasing(omega_grid))
        throw Error("transmission_spectrum: grid must be strictly increasing");
    SpectralCurve curve;
    curve.x.reserve(omega_grid.size());
    curve.y.reserve(omega_grid.size());
    for (double w : omega_grid) {
        const auto ctx = make_context(stack, w, theta_ext, pol);
        curve.x.push_back(2.0 * w / omega_ref);
        curve.y.push_back(transmittance(stack, ctx).T);
    }
    return curve;
}

std::vector<Peak> find_transmission_peaks(const SpectralCurve& curve, double min_prominence) {
    if (!(min_prominence > 0.0 && min_prominence <= 1.0))
        throw Error("find_transmission_peaks: min_prominence must be in (0, 1]");
    const auto& x = curve.x;
    const auto& y = curve.y;
    std::vector<Peak> peaks;
    if (y.size() < 3) return peaks;

    for (std::size_t i = 1; i + 1 < y.size();) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < y.size() && y[j + 1] == y[i]) ++j; // plateau
        if (j + 1 >= y.size() || !(y[j + 1] < y[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t mid = (i + j) / 2;
        const double height = y[mid];

        // prominence: lowest point until higher terrain on each side
        double left_min = height;
        for (std::size_t l = i; l-- > 0;) {
            left_min = std::min(left_min, y[l]);
            if (y[l] > height) break;
        }
        double right_min = height;
        for (std::size_t r = j + 1; r < y.size(); ++r) {
            right_min = std::min(right_min, y[r]);
            if (y[r] > height) break;
        }
        const double prominence = height - std::max(left_min, right_min);
        if (prominence >= min_prominence) {
            const double level = height - 0.5 * prominence;
            double xl = x.front();
            for (std::size_t l = mid; l-- > 0;) {
                if (y[l] <= level) {
                    const double f = (level - y[l]) / (y[l + 1] - y[l]);
                    xl = x[l] + f * (x[l + 1] - x[l]);
                    break;
                }
            }
            double xr = x.back();
            for (std::size_t r = mid + 1; r < y.size(); ++r) {
                if (y[r] <= level) {
                    const double f = (y[r - 1] - level) / (y[r - 1] - y[r]);
                    xr = x[r - 1] + f * (x[r] - x[r - 1]);
                    break;
                }
            }
            peaks.push_back({0.5 * (x[i] + x[j]), height, xr - xl});
        }
        i = j + 1;
    }
    return peaks;
}

} // namespace pbg
