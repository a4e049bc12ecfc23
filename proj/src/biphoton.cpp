#include "pbg/biphoton.hpp"

#include <cmath>

#include "pbg/errors.hpp"
#include "pbg/grid.hpp"

namespace pbg {

namespace {

constexpr complexd I{0.0, 1.0};

void check_symmetric(std::span<const double> detuning, double scale) {
    const std::size_t n = detuning.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(detuning[i] + detuning[n - 1 - i]) > 1e-9 * scale)
            throw AsymmetricGrid("detuning grid is not symmetric about the degenerate point");
}

double grid_scale(std::span<const double> x) {
    return std::max(std::abs(x.front()), std::abs(x.back()));
}

} // namespace

AntisymProfile make_profile(std::span<const double> detuning, std::span<const complexd> f,
                            double omega_s0, double omega_i0) {
    if (detuning.size() != f.size() || detuning.size() < 3)
        throw Error("make_profile: need matching grids with at least 3 points");
    if (!strictly_increasing(detuning)) throw Error("make_profile: grid must be strictly increasing");
    check_symmetric(detuning, grid_scale(detuning));

    AntisymProfile p;
    p.detuning.assign(detuning.begin(), detuning.end());
    p.f.assign(f.begin(), f.end());
    p.omega_s0 = omega_s0;
    p.omega_i0 = omega_i0;

    const std::size_t n = detuning.size();
    p.antisym.resize(n);
    std::vector<complexd> odd(n), even(n);
    for (std::size_t i = 0; i < n; ++i) {
        const complexd mirrored = f[n - 1 - i];
        p.antisym[i] = f[i] - mirrored;
        odd[i] = 0.5 * (f[i] - mirrored);
        even[i] = 0.5 * (f[i] + mirrored);
    }
    const double n_odd = trapezoid_norm_sq(detuning, odd);
    const double n_even = trapezoid_norm_sq(detuning, even);
    p.antisymmetry_fraction = (n_odd + n_even > 0.0) ? n_odd / (n_odd + n_even) : 0.0;
    return p;
}

AntisymProfile antisym_decompose(const JointSpectralAmplitude& jsa) {
    if (jsa.mode != JointSpectralAmplitude::Mode::cw_slice)
        throw Error("antisym_decompose: cw slice required");
    const double center = jsa.scheme.pump.omega0 / 2.0;
    std::vector<double> detuning(jsa.omega_s.size());
    for (std::size_t i = 0; i < detuning.size(); ++i) detuning[i] = jsa.omega_s[i] - center;
    return make_profile(detuning, jsa.amp, jsa.scheme.omega_s0, jsa.scheme.omega_i0);
}

GFunction g_function(const AntisymProfile& profile, std::span<const double> tau_grid) {
    if (tau_grid.empty()) throw Error("g_function: empty tau grid");
    double tau_max = 0.0;
    for (double t : tau_grid) tau_max = std::max(tau_max, std::abs(t));
    const std::size_t n = profile.detuning.size();
    const double step = (profile.detuning.back() - profile.detuning.front()) /
                        static_cast<double>(n - 1);
    if (2.0 * step * tau_max > pi)
        throw NyquistViolation("g_function: detuning grid too coarse for the requested delays");

    const auto w = trapezoid_weights(profile.detuning);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = std::norm(profile.antisym[i]);

    GFunction g;
    g.tau.assign(tau_grid.begin(), tau_grid.end());
    g.g.resize(tau_grid.size());
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
        complexd acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += w[i] * h[i] * std::exp(-2.0 * I * profile.detuning[i] * tau_grid[j]);
        g.g[j] = acc;
    }
    complexd g0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) g0 += w[i] * h[i];
    g.g0 = g0;
    return g;
}

namespace {

double peak_integrand_scale(const AntisymProfile& profile) {
    double peak = 0.0;
    for (const auto& v : profile.antisym) peak = std::max(peak, std::norm(v));
    const double span = profile.detuning.back() - profile.detuning.front();
    return peak * span;
}

} // namespace

HOMTrace hom_rate(const AntisymProfile& profile, std::span<const double> tau_grid) {
    const auto g = g_function(profile, tau_grid);
    const double g0 = std::real(g.g0);
    if (g0 <= 1e-12 * peak_integrand_scale(profile))
        throw VanishingState("hom_rate: no antisymmetric component to interfere");

    HOMTrace trace;
    trace.tau.assign(tau_grid.begin(), tau_grid.end());
    trace.rn.resize(tau_grid.size());
    const double carrier = profile.omega_s0 - profile.omega_i0;
    for (std::size_t j = 0; j < tau_grid.size(); ++j)
        trace.rn[j] = 1.0 + std::real(std::exp(-I * carrier * tau_grid[j]) * g.g[j]) / g0;
    return trace;
}

HOMTrace hom_rate_general(const AntisymProfile& profile, std::span<const double> tau_grid) {
    const std::size_t n = profile.detuning.size();
    const auto w = trapezoid_weights(profile.detuning);

    double norm = 0.0, peak_f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        norm += w[i] * std::norm(profile.f[i]);
        peak_f = std::max(peak_f, std::norm(profile.f[i]));
    }
    const double span = profile.detuning.back() - profile.detuning.front();
    if (!(norm > 1e-12 * peak_f * span) || !(norm > 0.0))
        throw VanishingState("hom_rate_general: vanishing slice");

    // exchange-overlap kernel phi(d) phi*(-d)
    std::vector<complexd> cross(n);
    for (std::size_t i = 0; i < n; ++i) cross[i] = profile.f[i] * std::conj(profile.f[n - 1 - i]);

    HOMTrace trace;
    trace.tau.assign(tau_grid.begin(), tau_grid.end());
    trace.rn.resize(tau_grid.size());
    const double carrier = profile.omega_s0 - profile.omega_i0;
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
        complexd acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += w[i] * cross[i] * std::exp(-2.0 * I * profile.detuning[i] * tau_grid[j]);
        trace.rn[j] = 1.0 - std::real(std::exp(-I * carrier * tau_grid[j]) * acc) / norm;
    }
    return trace;
}

HOMTrace hom_rate_general(const JointSpectralAmplitude& jsa, std::span<const double> tau_grid) {
    return hom_rate_general(antisym_decompose(jsa), tau_grid);
}

complexd TemporalAmplitude::at(std::size_t is, std::size_t ii) const {
    if (cw_cut) {
        // envelope depends on tau_s - tau_i only; both grids share the spacing
        const auto n = static_cast<std::ptrdiff_t>(a.size());
        const std::ptrdiff_t center = n / 2;
        const std::ptrdiff_t idx =
            static_cast<std::ptrdiff_t>(is) - static_cast<std::ptrdiff_t>(ii) + center;
        if (idx < 0 || idx >= n) return 0.0;
        return a[static_cast<std::size_t>(idx)];
    }
    return a[is * tau_i.size() + ii];
}

namespace {

// dual grid of a uniform frequency grid: spacing 2 pi / (N domega), centered
std::vector<double> dual_time_grid(std::size_t n, double domega) {
    std::vector<double> tau(n);
    const double dtau = two_pi / (static_cast<double>(n) * domega);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t j = 0; j < n; ++j)
        tau[j] = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * dtau;
    return tau;
}

void require_uniform(std::span<const double> x, const char* what) {
    if (x.size() < 2) throw NonUniformGrid(std::string(what) + ": grid too short");
    if (uniformity_error(x) > 1e-9)
        throw NonUniformGrid(std::string(what) + ": grid must be uniform");
}

} // namespace

TemporalAmplitude temporal_amplitude(const JointSpectralAmplitude& jsa) {
    TemporalAmplitude out;
    out.omega_s0 = jsa.scheme.omega_s0;
    out.omega_i0 = jsa.scheme.omega_i0;

    if (jsa.mode == JointSpectralAmplitude::Mode::cw_slice) {
        require_uniform(jsa.omega_s, "temporal_amplitude");
        const std::size_t n = jsa.omega_s.size();
        const double domega = (jsa.omega_s.back() - jsa.omega_s.front()) / static_cast<double>(n - 1);
        const double center = jsa.scheme.pump.omega0 / 2.0;

        out.cw_cut = true;
        out.tau_s = dual_time_grid(n, domega);
        out.tau_i = out.tau_s;
        out.a.assign(n, 0.0);

        const double scale = domega / std::sqrt(two_pi);
        for (std::size_t j = 0; j < n; ++j) {
            complexd acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += jsa.amp[i] * std::exp(-I * (jsa.omega_s[i] - center) * out.tau_s[j]);
            out.a[j] = scale * acc;
        }

        double fn = 0.0, tn = 0.0;
        for (std::size_t i = 0; i < n; ++i) fn += std::norm(jsa.amp[i]) * domega;
        const double dtau = out.tau_s[1] - out.tau_s[0];
        for (std::size_t j = 0; j < n; ++j) tn += std::norm(out.a[j]) * dtau;
        out.freq_norm_sq = fn;
        out.time_norm_sq = tn;
        return out;
    }

    require_uniform(jsa.omega_s, "temporal_amplitude");
    require_uniform(jsa.omega_i, "temporal_amplitude");
    const std::size_t ns = jsa.omega_s.size(), ni = jsa.omega_i.size();
    const double ds = (jsa.omega_s.back() - jsa.omega_s.front()) / static_cast<double>(ns - 1);
    const double di = (jsa.omega_i.back() - jsa.omega_i.front()) / static_cast<double>(ni - 1);

    out.cw_cut = false;
    out.tau_s = dual_time_grid(ns, ds);
    out.tau_i = dual_time_grid(ni, di);
    out.a.assign(ns * ni, 0.0);

    // separable two-pass transform with the carriers factored out
    std::vector<complexd> half(ns * ni);
    for (std::size_t is = 0; is < ns; ++is)
        for (std::size_t jt = 0; jt < ni; ++jt) {
            complexd acc = 0.0;
            for (std::size_t ii = 0; ii < ni; ++ii)
                acc += jsa.at(is, ii) *
                       std::exp(-I * (jsa.omega_i[ii] - jsa.scheme.omega_i0) * out.tau_i[jt]);
            half[is * ni + jt] = acc;
        }
    const double scale = ds * di / two_pi;
    for (std::size_t js = 0; js < ns; ++js)
        for (std::size_t jt = 0; jt < ni; ++jt) {
            complexd acc = 0.0;
            for (std::size_t is = 0; is < ns; ++is)
                acc += half[is * ni + jt] *
                       std::exp(-I * (jsa.omega_s[is] - jsa.scheme.omega_s0) * out.tau_s[js]);
            out.a[js * ni + jt] = scale * acc;
        }

    double fn = 0.0, tn = 0.0;
    for (const auto& v : jsa.amp) fn += std::norm(v) * ds * di;
    const double dts = out.tau_s[1] - out.tau_s[0];
    const double dti = out.tau_i[1] - out.tau_i[0];
    for (const auto& v : out.a) tn += std::norm(v) * dts * dti;
    out.freq_norm_sq = fn;
    out.time_norm_sq = tn;
    return out;
}

ConditionalDetection conditional_detection(const TemporalAmplitude& amplitude, double tau_s) {
    if (amplitude.tau_s.empty()) throw Error("conditional_detection: empty amplitude");
    if (tau_s < amplitude.tau_s.front() || tau_s > amplitude.tau_s.back())
        throw Error("conditional_detection: tau_s outside the time grid");

    // snap tau_s to the nearest grid point
    std::size_t row = 0;
    double best = std::abs(amplitude.tau_s[0] - tau_s);
    for (std::size_t j = 1; j < amplitude.tau_s.size(); ++j) {
        const double d = std::abs(amplitude.tau_s[j] - tau_s);
        if (d < best) {
            best = d;
            row = j;
        }
    }

    ConditionalDetection out;
    out.tau_s = amplitude.tau_s[row];
    out.tau_i = amplitude.tau_i;
    out.p.resize(amplitude.tau_i.size());

    double peak = 0.0;
    for (std::size_t ii = 0; ii < out.p.size(); ++ii) {
        out.p[ii] = std::norm(amplitude.at(row, ii));
        peak = std::max(peak, out.p[ii]);
    }
    double global_peak = 0.0;
    for (const auto& v : amplitude.a) global_peak = std::max(global_peak, std::norm(v));
    if (peak <= 1e-28 * global_peak)
        throw ZeroRow("conditional_detection: amplitude vanishes at this tau_s");

    const double integral = trapezoid(out.tau_i, out.p);
    for (auto& v : out.p) v /= integral;
    return out;
}

} // namespace pbg
