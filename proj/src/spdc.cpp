#include "pbg/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>
#include <thread>

#include "pbg/errors.hpp"
#include "pbg/grid.hpp"

namespace pbg {

namespace {

constexpr complexd I{0.0, 1.0};
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

complexd csinc(complexd z) {
    if (std::abs(z) < 1e-4) {
        const complexd z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

} // namespace

double PumpEnvelope::spectral_sigma() const {
    if (kind == Kind::cw) return 0.0;
    // duration is the intensity FWHM; amplitude ~ exp(-(w-w0)^2 tg^2 / 4)
    const double tg = duration_fs * 1e-15 / std::sqrt(2.0 * std::log(2.0));
    return std::sqrt(2.0) / tg;
}

complexd PumpEnvelope::amplitude(double omega, double omega0) const {
    if (kind == Kind::cw) return 1.0;
    const double tg = duration_fs * 1e-15 / std::sqrt(2.0 * std::log(2.0));
    const double d = omega - omega0;
    return std::exp(-d * d * tg * tg / 4.0);
}

void SchemeConfig::validate() const {
    if (!(pump.omega0 > 0.0)) throw Error("scheme: pump frequency must be positive");
    const double sum = omega_s0 + omega_i0;
    if (std::abs(sum - pump.omega0) > 1e-12 * pump.omega0)
        throw Error("scheme: omega_s0 + omega_i0 must equal the pump central frequency");
    if (pump.envelope.kind == PumpEnvelope::Kind::gaussian && !(pump.envelope.duration_fs > 0.0))
        throw Error("scheme: gaussian pump needs a positive duration");
}

SchemeConfig SchemeConfig::scheme1_all_p(double omega_p, double theta_s, DirectionPair pair) {
    SchemeConfig s;
    s.kind = SchemeKind::scheme1_all_p;
    s.pump = {omega_p, Polarization::p, 0.0, {}};
    s.signal_pol = AnalysisPol::p;
    s.idler_pol = AnalysisPol::p;
    s.theta_s = theta_s;
    s.omega_s0 = omega_p / 2.0;
    s.omega_i0 = omega_p / 2.0;
    s.pair = pair;
    return s;
}

SchemeConfig SchemeConfig::scheme2_sp(double omega_p, double theta_s, DirectionPair pair) {
    SchemeConfig s = scheme1_all_p(omega_p, theta_s, pair);
    s.kind = SchemeKind::scheme2_sp;
    s.pump.pol = Polarization::s;
    s.signal_pol = AnalysisPol::p;
    s.idler_pol = AnalysisPol::s;
    return s;
}

SchemeConfig SchemeConfig::scheme1_45deg(double omega_p, double theta_s, DirectionPair pair) {
    SchemeConfig s = scheme1_all_p(omega_p, theta_s, pair);
    s.kind = SchemeKind::scheme1_45deg;
    s.pump.pol = Polarization::s;
    s.signal_pol = AnalysisPol::diag45;
    s.idler_pol = AnalysisPol::diag45;
    return s;
}

EmissionGeometry idler_geometry(double omega_s, double theta_s, const PumpConfig& pump) {
    if (!(omega_s > 0.0 && omega_s < pump.omega0))
        throw Error("idler_geometry: omega_s must lie in (0, omega_p)");
    if (!(std::abs(theta_s) < pi / 2.0))
        throw Error("idler_geometry: |theta_s| must be below 90 deg");

    EmissionGeometry g;
    g.omega_s = omega_s;
    g.omega_i = pump.omega0 - omega_s;
    g.theta_s = theta_s;

    // transverse momentum conservation in the common ambient
    const double sin_i =
        (pump.omega0 * std::sin(pump.theta) - omega_s * std::sin(theta_s)) / g.omega_i;
    if (std::abs(sin_i) > 1.0)
        throw EvanescentIdler("idler_geometry: required |sin theta_i| = " + std::to_string(std::abs(sin_i)));
    g.theta_i = std::asin(sin_i);

    const double c = 299792458.0;
    g.k_s = omega_s / c;
    g.k_i = g.omega_i / c;
    g.transverse_residual = std::abs(g.omega_s * std::sin(g.theta_s) + g.omega_i * std::sin(g.theta_i) -
                                     pump.omega0 * std::sin(pump.theta)) / c;
    return g;
}

complexd layer_overlap_integral(complexd dk, double thickness_m) {
    if (!(thickness_m > 0.0)) throw Error("layer_overlap_integral: thickness must be positive");
    const complexd half = 0.5 * dk * thickness_m;
    return thickness_m * std::exp(I * half) * csinc(half);
}

double PhysicalConstants::pair_prefactor(double omega_s0, double omega_i0) const {
    return hbar * std::sqrt(omega_s0 * omega_i0) /
           (2.0 * std::pow(two_pi, 1.5) * epsilon0 * c * beam_area);
}

namespace {

// One plane-wave component entering the overlap integrand: amplitude, complex
// wavenumber along z, polarization vector (all referenced to the layer's left
// boundary).
struct Component {
    complexd coeff;
    complexd kappa;
    Vec3c vec;
};

struct LayerTerms {
    Component pump[2];
    Component sig[2];
    Component idl[2];
};

Vec3c conj3(const Vec3c& v) {
    return Vec3c{std::conj(v[0]), std::conj(v[1]), std::conj(v[2])};
}

// Pump: positive-frequency field of the unit-incident solution.
void fill_pump(LayerTerms& t, const FieldDistribution& fd, std::size_t medium) {
    const auto& a = fd.media[medium];
    const auto& lw = fd.ctx.media[medium];
    t.pump[0] = {a.forward, lw.kz, polarization_vector(fd.ctx, medium, +1)};
    t.pump[1] = {a.backward, -lw.kz, polarization_vector(fd.ctx, medium, -1)};
}

// Down-converted photon: conjugated detection-mode field. Conjugation maps
// the forward part to wavenumber -conj(kz) and vice versa.
void fill_detection(Component out[2], const FieldDistribution& fd, std::size_t medium) {
    const auto& a = fd.media[medium];
    const auto& lw = fd.ctx.media[medium];
    out[0] = {std::conj(a.forward), -std::conj(lw.kz),
              conj3(polarization_vector(fd.ctx, medium, +1))};
    out[1] = {std::conj(a.backward), std::conj(lw.kz),
              conj3(polarization_vector(fd.ctx, medium, -1))};
}

Incidence exit_facet_signal(DirectionPair p) {
    return (p == DirectionPair::FF || p == DirectionPair::FB) ? Incidence::from_right
                                                              : Incidence::from_left;
}

Incidence exit_facet_idler(DirectionPair p) {
    return (p == DirectionPair::FF || p == DirectionPair::BF) ? Incidence::from_right
                                                              : Incidence::from_left;
}

std::vector<std::pair<Polarization, double>> analysis_components(AnalysisPol pol) {
    switch (pol) {
        case AnalysisPol::s: return {{Polarization::s, 1.0}};
        case AnalysisPol::p: return {{Polarization::p, 1.0}};
        case AnalysisPol::diag45:
            return {{Polarization::s, inv_sqrt2}, {Polarization::p, inv_sqrt2}};
    }
    return {};
}

// Overlap of pump, signal and idler fields over the nonlinear layers:
// 8 direction combinations per layer, analytic z-integral each.
complexd overlap_amplitude(const Multilayer& stack, const FieldDistribution& pump,
                           const FieldDistribution& sig, const FieldDistribution& idl) {
    complexd total = 0.0;
    for (std::size_t l = 0; l < stack.layers.size(); ++l) {
        const auto& layer = stack.layers[l];
        if (!layer.material.nonlinear()) continue;
        const std::size_t medium = l + 1;

        LayerTerms t;
        fill_pump(t, pump, medium);
        fill_detection(t.sig, sig, medium);
        fill_detection(t.idl, idl, medium);

        const auto& chi = layer.material.chi2;
        complexd layer_sum = 0.0;
        for (const auto& cp : t.pump)
            for (const auto& cs : t.sig)
                for (const auto& ci : t.idl) {
                    const complexd coupling = chi2_coupling_unnormalized(chi, cp.vec, cs.vec, ci.vec);
                    if (coupling == complexd(0.0)) continue;
                    const complexd dk = cp.kappa + cs.kappa + ci.kappa;
                    layer_sum += coupling * cp.coeff * cs.coeff * ci.coeff *
                                 layer_overlap_integral(dk, layer.thickness_m);
                }
        total += layer_sum;
    }
    return total;
}

struct SliceGeometry {
    double theta_i_central = 0.0;
};

SliceGeometry slice_geometry(const SchemeConfig& scheme, double theta_s) {
    SliceGeometry g;
    g.theta_i_central = idler_geometry(scheme.omega_s0, theta_s, scheme.pump).theta_i;
    return g;
}

// cw kernel at one (omega_s, omega_i) pair for fixed collection directions.
complexd kernel_value(const Multilayer& stack, const SchemeConfig& scheme,
                      const FieldDistribution& pump_fields, double omega_s, double omega_i,
                      double theta_s, double theta_i) {
    complexd acc = 0.0;
    for (const auto& [pol_s, w_s] : analysis_components(scheme.signal_pol)) {
        const auto ctx_s = make_context(stack, omega_s, theta_s, pol_s);
        const auto sig =
            internal_fields(stack, ctx_s, exit_facet_signal(scheme.pair), BoundaryKind::unit_outgoing);
        for (const auto& [pol_i, w_i] : analysis_components(scheme.idler_pol)) {
            const auto ctx_i = make_context(stack, omega_i, theta_i, pol_i);
            const auto idl = internal_fields(stack, ctx_i, exit_facet_idler(scheme.pair),
                                             BoundaryKind::unit_outgoing);
            acc += w_s * w_i * overlap_amplitude(stack, pump_fields, sig, idl);
        }
    }
    return acc;
}

FieldDistribution pump_solution(const Multilayer& stack, const SchemeConfig& scheme,
                                double omega_p) {
    const auto ctx = make_context(stack, omega_p, scheme.pump.theta, scheme.pump.pol);
    return internal_fields(stack, ctx, Incidence::from_left, BoundaryKind::unit_incident);
}

} // namespace

JointSpectralAmplitude jsa_cw(const Multilayer& stack, const SchemeConfig& scheme,
                              std::span<const double> omega_s_grid, double theta_s,
                              const PhysicalConstants& constants) {
    scheme.validate();
    if (omega_s_grid.empty()) throw Error("jsa_cw: empty grid");
    if (!strictly_increasing(omega_s_grid)) throw Error("jsa_cw: grid must be strictly increasing");
    if (!(omega_s_grid.front() > 0.0 && omega_s_grid.back() < scheme.pump.omega0))
        throw Error("jsa_cw: grid must lie inside (0, omega_p)");

    const auto geom = slice_geometry(scheme, theta_s);
    const auto pump = pump_solution(stack, scheme, scheme.pump.omega0);
    const double pf = constants.pair_prefactor(scheme.omega_s0, scheme.omega_i0);

    JointSpectralAmplitude out;
    out.mode = JointSpectralAmplitude::Mode::cw_slice;
    out.omega_s.assign(omega_s_grid.begin(), omega_s_grid.end());
    out.amp.resize(omega_s_grid.size());
    out.forbidden.assign(omega_s_grid.size(), 0);
    out.scheme = scheme;
    out.theta_s = theta_s;

    for (std::size_t i = 0; i < omega_s_grid.size(); ++i) {
        const double ws = omega_s_grid[i];
        const double wi = scheme.pump.omega0 - ws;
        try {
            idler_geometry(ws, theta_s, scheme.pump);
        } catch (const EvanescentIdler&) {
            out.amp[i] = 0.0;
            out.forbidden[i] = 1;
            continue;
        }
        out.amp[i] = pf * kernel_value(stack, scheme, pump, ws, wi, theta_s, geom.theta_i_central);
    }
    return out;
}

JointSpectralAmplitude jsa_pulsed(const Multilayer& stack, const SchemeConfig& scheme,
                                  std::span<const double> omega_s_grid,
                                  std::span<const double> omega_i_grid, double theta_s,
                                  const PhysicalConstants& constants) {
    scheme.validate();
    if (scheme.pump.envelope.kind != PumpEnvelope::Kind::gaussian)
        throw Error("jsa_pulsed: scheme must carry a gaussian pump envelope");
    if (omega_s_grid.empty() || omega_i_grid.empty()) throw Error("jsa_pulsed: empty grid");
    if (!strictly_increasing(omega_s_grid) || !strictly_increasing(omega_i_grid))
        throw Error("jsa_pulsed: grids must be strictly increasing");

    const double sigma = scheme.pump.envelope.spectral_sigma();
    if (omega_s_grid.front() > scheme.omega_s0 - 4.0 * sigma ||
        omega_s_grid.back() < scheme.omega_s0 + 4.0 * sigma ||
        omega_i_grid.front() > scheme.omega_i0 - 4.0 * sigma ||
        omega_i_grid.back() < scheme.omega_i0 + 4.0 * sigma)
        throw GridTooNarrow("jsa_pulsed: grids must cover at least +-4 pump spectral sigma");

    const auto geom = slice_geometry(scheme, theta_s);
    const double pf = constants.pair_prefactor(scheme.omega_s0, scheme.omega_i0);

    JointSpectralAmplitude out;
    out.mode = JointSpectralAmplitude::Mode::pulsed_grid;
    out.omega_s.assign(omega_s_grid.begin(), omega_s_grid.end());
    out.omega_i.assign(omega_i_grid.begin(), omega_i_grid.end());
    out.amp.assign(omega_s_grid.size() * omega_i_grid.size(), 0.0);
    out.scheme = scheme;
    out.theta_s = theta_s;

    // pump internal solution depends only on the total frequency; signal and
    // idler mode solves depend on one frequency each, so cache them per axis.
    std::vector<FieldDistribution> sig_fields, idl_fields;
    std::vector<std::pair<Polarization, double>> sig_pols = analysis_components(scheme.signal_pol);
    std::vector<std::pair<Polarization, double>> idl_pols = analysis_components(scheme.idler_pol);
    sig_fields.reserve(omega_s_grid.size() * sig_pols.size());
    idl_fields.reserve(omega_i_grid.size() * idl_pols.size());
    for (double ws : omega_s_grid)
        for (const auto& [pol, _] : sig_pols)
            sig_fields.push_back(internal_fields(stack, make_context(stack, ws, theta_s, pol),
                                                 exit_facet_signal(scheme.pair),
                                                 BoundaryKind::unit_outgoing));
    for (double wi : omega_i_grid)
        for (const auto& [pol, _] : idl_pols)
            idl_fields.push_back(internal_fields(stack,
                                                 make_context(stack, wi, geom.theta_i_central, pol),
                                                 exit_facet_idler(scheme.pair),
                                                 BoundaryKind::unit_outgoing));

    const std::size_t ns = omega_s_grid.size(), ni = omega_i_grid.size();
    for (std::size_t is = 0; is < ns; ++is) {
        for (std::size_t ii = 0; ii < ni; ++ii) {
            const double wp = omega_s_grid[is] + omega_i_grid[ii];
            const complexd env = scheme.pump.envelope.amplitude(wp, scheme.pump.omega0);
            if (std::abs(env) < 1e-14) continue;
            const auto pump = pump_solution(stack, scheme, wp);
            complexd acc = 0.0;
            for (std::size_t a = 0; a < sig_pols.size(); ++a)
                for (std::size_t b = 0; b < idl_pols.size(); ++b)
                    acc += sig_pols[a].second * idl_pols[b].second *
                           overlap_amplitude(stack, pump, sig_fields[is * sig_pols.size() + a],
                                             idl_fields[ii * idl_pols.size() + b]);
            out.amp[is * ni + ii] = pf * env * acc;
        }
    }

    // unit squared norm over the grid (one pair within the plotted ranges)
    const auto ws_w = trapezoid_weights(omega_s_grid);
    const auto wi_w = trapezoid_weights(omega_i_grid);
    double norm = 0.0, inside = 0.0;
    for (std::size_t is = 0; is < ns; ++is)
        for (std::size_t ii = 0; ii < ni; ++ii) {
            const double cell = ws_w[is] * wi_w[ii] * std::norm(out.amp[is * ni + ii]);
            norm += cell;
            if (std::abs(omega_s_grid[is] + omega_i_grid[ii] - scheme.pump.omega0) <= 4.0 * sigma)
                inside += cell;
        }
    if (!(norm > 0.0)) throw Error("jsa_pulsed: amplitude vanished over the whole grid");
    if (inside / norm < 0.99)
        throw GridTooNarrow("jsa_pulsed: support check failed (" +
                            std::to_string(inside / norm) + " of the norm inside +-4 sigma)");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : out.amp) a *= scale;
    return out;
}

RateMap generation_rate_map(const Multilayer& stack, const SchemeConfig& scheme,
                            std::span<const double> omega_s_grid,
                            std::span<const double> theta_grid,
                            const PhysicalConstants& constants, bool normalize, int threads) {
    scheme.validate();
    if (omega_s_grid.empty() || theta_grid.empty()) throw Error("generation_rate_map: empty grid");

    RateMap map;
    map.omega_norm.reserve(omega_s_grid.size());
    for (double w : omega_s_grid) map.omega_norm.push_back(2.0 * w / scheme.pump.omega0);
    map.theta.assign(theta_grid.begin(), theta_grid.end());
    map.value.assign(omega_s_grid.size() * theta_grid.size(), 0.0);
    map.normalized = normalize;

    auto run_row = [&](std::size_t it) {
        const auto slice = jsa_cw(stack, scheme, omega_s_grid, theta_grid[it], constants);
        for (std::size_t iw = 0; iw < omega_s_grid.size(); ++iw)
            map.value[it * omega_s_grid.size() + iw] = std::norm(slice.amp[iw]);
    };

    if (threads <= 1) {
        for (std::size_t it = 0; it < theta_grid.size(); ++it) run_row(it);
    } else {
        std::vector<std::future<void>> jobs;
        std::size_t next = 0;
        const std::size_t n = theta_grid.size();
        std::mutex mtx;
        auto worker = [&]() {
            for (;;) {
                std::size_t it;
                {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (next >= n) return;
                    it = next++;
                }
                run_row(it);
            }
        };
        const int nthreads = std::min<int>(threads, static_cast<int>(n));
        jobs.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) jobs.push_back(std::async(std::launch::async, worker));
        for (auto& j : jobs) j.get();
    }

    if (normalize) {
        double peak = 0.0;
        for (double v : map.value) peak = std::max(peak, v);
        if (peak > 0.0)
            for (auto& v : map.value) v /= peak;
    }
    return map;
}

std::map<DirectionPair, JointSpectralAmplitude>
direction_pair_amplitudes(const Multilayer& stack, const SchemeConfig& scheme,
                          std::span<const double> omega_s_grid, double theta_s,
                          const PhysicalConstants& constants) {
    std::map<DirectionPair, JointSpectralAmplitude> out;
    for (DirectionPair p :
         {DirectionPair::FF, DirectionPair::FB, DirectionPair::BF, DirectionPair::BB}) {
        SchemeConfig s = scheme;
        s.pair = p;
        out.emplace(p, jsa_cw(stack, s, omega_s_grid, theta_s, constants));
    }
    return out;
}

} // namespace pbg
