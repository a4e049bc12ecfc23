#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pbg/biphoton.hpp"
#include "pbg/constants.hpp"
#include "pbg/errors.hpp"
#include "pbg/grid.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace pbg;

namespace {

constexpr double kOmega0 = 2.4e15; // degenerate central frequency for synthetic profiles

// two-peak profile f(d) = exp(-(d - peak)^2 / (2 sigma^2))
std::vector<complexd> gaussian_peak(std::span<const double> detuning, double peak, double sigma) {
    std::vector<complexd> f(detuning.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = std::exp(-std::pow((detuning[i] - peak) / sigma, 2) / 2.0);
    return f;
}

std::vector<complexd> odd_profile(std::span<const double> detuning, double sigma) {
    std::vector<complexd> f(detuning.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = detuning[i] / sigma * std::exp(-std::pow(detuning[i] / sigma, 2));
    return f;
}

std::vector<complexd> even_profile(std::span<const double> detuning, double sigma) {
    std::vector<complexd> f(detuning.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = std::exp(-std::pow(detuning[i] / sigma, 2));
    return f;
}

void normalize(std::span<const double> x, std::vector<complexd>& f) {
    const double n = std::sqrt(trapezoid_norm_sq(x, f));
    for (auto& v : f) v /= n;
}

} // namespace

TEST_CASE("antisymmetric decomposition fractions") {
    const auto grid = symmetric_grid(0.0, 5e13, 400);
    SUBCASE("pure odd") {
        const auto p = make_profile(grid, odd_profile(grid, 1e13), kOmega0, kOmega0);
        CHECK(p.antisymmetry_fraction == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("pure even") {
        const auto p = make_profile(grid, even_profile(grid, 1e13), kOmega0, kOmega0);
        CHECK(p.antisymmetry_fraction == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("odd plus half even gives 0.8") {
        auto odd = odd_profile(grid, 1e13);
        auto even = even_profile(grid, 1e13);
        normalize(grid, odd);
        normalize(grid, even);
        std::vector<complexd> mix(grid.size());
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = odd[i] + 0.5 * even[i];
        const auto p = make_profile(grid, mix, kOmega0, kOmega0);
        CHECK(p.antisymmetry_fraction == doctest::Approx(0.8).epsilon(1e-9));
    }
    SUBCASE("asymmetric grids are rejected") {
        const auto bad = linspace(-4e13, 5e13, 128);
        CHECK_THROWS_AS(make_profile(bad, even_profile(bad, 1e13), kOmega0, kOmega0),
                        AsymmetricGrid);
    }
}

TEST_CASE("g function") {
    const auto grid = symmetric_grid(0.0, 8e13, 600);
    SUBCASE("zero input gives zero g") {
        std::vector<complexd> zero(grid.size(), 0.0);
        const auto p = make_profile(grid, zero, kOmega0, kOmega0);
        const auto tau = symmetric_grid(0.0, 1e-13, 16);
        const auto g = g_function(p, tau);
        for (const auto& v : g.g) CHECK(std::abs(v) == 0.0);
    }
    SUBCASE("g(0) is real and nonnegative for random complex profiles") {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int t = 0; t < 10; ++t) {
            std::vector<complexd> f(grid.size());
            for (auto& v : f) v = complexd(uni(rng), uni(rng));
            const auto p = make_profile(grid, f, kOmega0, kOmega0);
            const auto tau = symmetric_grid(0.0, 1e-14, 4);
            const auto g = g_function(p, tau);
            CHECK(std::real(g.g0) >= 0.0);
            CHECK(std::abs(std::imag(g.g0)) <= 1e-12 * std::abs(g.g0));
        }
    }
    SUBCASE("gaussian two-peak closed form") {
        const double peak = 2.5e13, sigma = 6e12;
        const auto p = make_profile(grid, gaussian_peak(grid, peak, sigma), kOmega0, kOmega0);
        const auto tau = symmetric_grid(0.0, 3e-13, 300);
        const auto g = g_function(p, tau);
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const complexd want = oracle::gaussian_two_peak_g(peak, sigma, tau[i]);
            CHECK(std::abs(g.g[i] - want) <= 1e-8 * std::abs(oracle::gaussian_two_peak_g(peak, sigma, 0.0)));
        }
    }
    SUBCASE("hermitian symmetry") {
        const auto p = make_profile(grid, gaussian_peak(grid, 2e13, 5e12), kOmega0, kOmega0);
        const auto tau = symmetric_grid(0.0, 2e-13, 100);
        const auto g = g_function(p, tau);
        const std::size_t n = tau.size();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(g.g[i] - std::conj(g.g[n - 1 - i])) <= 1e-10 * std::abs(g.g0));
    }
    SUBCASE("delays beyond the grid resolution are rejected") {
        const auto p = make_profile(grid, gaussian_peak(grid, 2e13, 5e12), kOmega0, kOmega0);
        const auto tau = symmetric_grid(0.0, 1e-10, 8);
        CHECK_THROWS_AS(g_function(p, tau), NyquistViolation);
    }
}

TEST_CASE("hom_rate") {
    const auto grid = symmetric_grid(0.0, 8e13, 600);
    const double peak = 2.5e13, sigma = 6e12;
    const auto p = make_profile(grid, gaussian_peak(grid, peak, sigma), kOmega0, kOmega0);
    const auto tau = symmetric_grid(0.0, 2.5e-13, 500);
    const auto trace = hom_rate(p, tau);
    const std::size_t c = tau.size() / 2;

    SUBCASE("central value is exactly 2") {
        CHECK(trace.rn[c] == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("tails approach independent photons") {
        const auto long_tau = symmetric_grid(0.0, 6e-13, 600);
        const auto long_trace = hom_rate(p, long_tau);
        CHECK(std::abs(long_trace.rn.front() - 1.0) < 0.02);
        CHECK(std::abs(long_trace.rn.back() - 1.0) < 0.02);
    }
    SUBCASE("matches the gaussian closed form everywhere") {
        const double g0 = std::real(oracle::gaussian_two_peak_g(peak, sigma, 0.0));
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const double want = 1.0 + std::real(oracle::gaussian_two_peak_g(peak, sigma, tau[i])) / g0;
            CHECK(trace.rn[i] == doctest::Approx(want).epsilon(1e-6));
        }
    }
    SUBCASE("even in the delay for real profiles with degenerate centrals") {
        for (std::size_t i = 0; i < tau.size(); ++i)
            CHECK(std::abs(trace.rn[i] - trace.rn[tau.size() - 1 - i]) < 1e-9);
    }
    SUBCASE("oscillation period follows the peak separation") {
        // closed form: the oscillatory factor is cos(2 peak tau); the gaussian
        // envelope shifts the extrema by O(sigma^2/peak^2) of a period
        const auto sharp = make_profile(grid, gaussian_peak(grid, peak, 4e12), kOmega0, kOmega0);
        const auto ptau = symmetric_grid(0.0, 2.5e-13, 125); // 2 fs steps
        const auto ptrace = hom_rate(sharp, ptau);
        const std::size_t pc = ptau.size() / 2;
        std::vector<double> minima;
        for (std::size_t i = pc + 1; i + 1 < ptau.size() && minima.size() < 2; ++i)
            if (ptrace.rn[i] < ptrace.rn[i - 1] && ptrace.rn[i] <= ptrace.rn[i + 1])
                minima.push_back(ptau[i]);
        REQUIRE(minima.size() == 2);
        const double period = minima[1] - minima[0];
        CHECK(std::abs(period - pi / peak) <= 2.0 * (ptau[1] - ptau[0]));
    }
    SUBCASE("fully symmetric profiles cannot interfere") {
        const auto even = make_profile(grid, even_profile(grid, 1e13), kOmega0, kOmega0);
        CHECK_THROWS_AS(hom_rate(even, tau), VanishingState);
    }
}

TEST_CASE("hom_rate_general") {
    const auto grid = symmetric_grid(0.0, 8e13, 600);
    const auto tau = symmetric_grid(0.0, 2.5e-13, 400);
    const std::size_t c = tau.size() / 2;

    SUBCASE("agrees with hom_rate for odd slices") {
        const auto odd = odd_profile(grid, 2e13);
        const auto p = make_profile(grid, odd, kOmega0, kOmega0);
        const auto a = hom_rate(p, tau);
        const auto b = hom_rate_general(p, tau);
        for (std::size_t i = 0; i < tau.size(); ++i)
            CHECK(std::abs(a.rn[i] - b.rn[i]) < 1e-6);
    }
    SUBCASE("even slices dip to zero coincidences") {
        const auto p = make_profile(grid, even_profile(grid, 1.5e13), kOmega0, kOmega0);
        const auto trace = hom_rate_general(p, tau);
        CHECK(std::abs(trace.rn[c]) < 1e-9);
    }
    SUBCASE("0.8 antisymmetry fraction gives a 60 percent excess") {
        auto odd = odd_profile(grid, 1e13);
        auto even = even_profile(grid, 1e13);
        normalize(grid, odd);
        normalize(grid, even);
        std::vector<complexd> mix(grid.size());
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = odd[i] + 0.5 * even[i];
        const auto p = make_profile(grid, mix, kOmega0, kOmega0);
        const auto trace = hom_rate_general(p, tau);
        CHECK(trace.rn[c] == doctest::Approx(1.6).epsilon(1e-6));
    }
}

TEST_CASE("temporal amplitude") {
    const auto grid = symmetric_grid(0.0, 8e13, 512);
    const double peak = 2.5e13, sigma = 6e12;

    auto slice_from = [&](const std::vector<complexd>& f) {
        JointSpectralAmplitude jsa;
        jsa.mode = JointSpectralAmplitude::Mode::cw_slice;
        jsa.scheme = SchemeConfig::scheme1_all_p(2.0 * kOmega0, 0.0);
        jsa.theta_s = 0.0;
        jsa.omega_s.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) jsa.omega_s[i] = kOmega0 + grid[i];
        jsa.amp = f;
        return jsa;
    };

    SUBCASE("antisymmetric combination has envelope |sin| times gaussian") {
        auto f = gaussian_peak(grid, peak, sigma);
        const std::size_t n = grid.size();
        std::vector<complexd> anti(n);
        for (std::size_t i = 0; i < n; ++i) anti[i] = f[i] - f[n - 1 - i];
        const auto ta = temporal_amplitude(slice_from(anti));
        double scale = 0.0, oscale = 0.0;
        for (std::size_t j = 0; j < ta.a.size(); ++j) {
            scale = std::max(scale, std::abs(ta.a[j]));
            oscale = std::max(oscale, oracle::gaussian_two_peak_envelope(peak, sigma, ta.tau_s[j]));
        }
        for (std::size_t j = 0; j < ta.a.size(); ++j) {
            const double want = oracle::gaussian_two_peak_envelope(peak, sigma, ta.tau_s[j]) / oscale;
            CHECK(std::abs(ta.a[j]) / scale == doctest::Approx(want).epsilon(1e-6));
        }
        SUBCASE("diagonal node") {
            // tau_s = tau_i corresponds to the zero-argument envelope value
            const std::size_t center = ta.a.size() / 2;
            CHECK(std::abs(ta.a[center]) <= 1e-6 * scale);
            CHECK(std::abs(ta.at(10, 10)) <= 1e-6 * scale);
        }
    }
    SUBCASE("parseval") {
        const auto ta = temporal_amplitude(slice_from(gaussian_peak(grid, peak, sigma)));
        CHECK(ta.time_norm_sq == doctest::Approx(ta.freq_norm_sq).epsilon(1e-6));
    }
    SUBCASE("nonuniform grids are rejected") {
        auto jsa = slice_from(gaussian_peak(grid, peak, sigma));
        jsa.omega_s[3] += 1e9;
        CHECK_THROWS_AS(temporal_amplitude(jsa), NonUniformGrid);
    }
}

TEST_CASE("conditional detection") {
    const auto grid = symmetric_grid(0.0, 8e13, 512);
    const double peak = 2.5e13, sigma = 6e12;
    JointSpectralAmplitude jsa;
    jsa.mode = JointSpectralAmplitude::Mode::cw_slice;
    jsa.scheme = SchemeConfig::scheme1_all_p(2.0 * kOmega0, 0.0);
    jsa.omega_s.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) jsa.omega_s[i] = kOmega0 + grid[i];
    auto f = gaussian_peak(grid, peak, sigma);
    jsa.amp.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) jsa.amp[i] = f[i] - f[grid.size() - 1 - i];
    const auto ta = temporal_amplitude(jsa);
    const auto cond = conditional_detection(ta, 0.0);

    SUBCASE("density integrates to one") {
        CHECK(trapezoid(cond.tau_i, cond.p) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("temporal anti-bunching with a double hump") {
        double pmax = 0.0;
        std::size_t center = 0;
        for (std::size_t i = 0; i < cond.p.size(); ++i) {
            pmax = std::max(pmax, cond.p[i]);
            if (std::abs(cond.tau_i[i]) < 1e-18) center = i;
        }
        CHECK(cond.p[center] <= 1e-6 * pmax);
        int humps = 0;
        for (std::size_t i = 1; i + 1 < cond.p.size(); ++i)
            if (cond.p[i] > cond.p[i - 1] && cond.p[i] >= cond.p[i + 1] && cond.p[i] > 0.5 * pmax)
                ++humps;
        CHECK(humps >= 2);
    }
    SUBCASE("symmetric about the heralding time for degenerate centrals") {
        const std::size_t n = cond.p.size();
        double pmax = 0.0;
        for (double v : cond.p) pmax = std::max(pmax, v);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(cond.p[i] - cond.p[n - 1 - i]) <= 1e-6 * pmax);
    }
    SUBCASE("vanishing rows are rejected") {
        JointSpectralAmplitude zero = jsa;
        std::fill(zero.amp.begin(), zero.amp.end(), complexd(0.0));
        // a fully zero slice has zero temporal amplitude everywhere
        CHECK_THROWS_AS(conditional_detection(temporal_amplitude(zero), 0.0), ZeroRow);
    }
}

TEST_CASE("time-frequency duality under peak-separation scaling") {
    const auto grid = symmetric_grid(0.0, 1.6e14, 1024);
    const double sigma = 6e12;
    auto period_of = [&](double peak) {
        auto f = gaussian_peak(grid, peak, sigma);
        const std::size_t n = grid.size();
        std::vector<complexd> anti(n);
        for (std::size_t i = 0; i < n; ++i) anti[i] = f[i] - f[n - 1 - i];
        JointSpectralAmplitude jsa;
        jsa.mode = JointSpectralAmplitude::Mode::cw_slice;
        jsa.scheme = SchemeConfig::scheme1_all_p(2.0 * kOmega0, 0.0);
        jsa.omega_s.resize(n);
        for (std::size_t i = 0; i < n; ++i) jsa.omega_s[i] = kOmega0 + grid[i];
        jsa.amp = anti;
        const auto cond = conditional_detection(temporal_amplitude(jsa), 0.0);
        // first maximum after the central node
        const std::size_t c = cond.p.size() / 2;
        for (std::size_t i = c + 1; i + 1 < cond.p.size(); ++i)
            if (cond.p[i] > cond.p[i - 1] && cond.p[i] >= cond.p[i + 1])
                return std::pair{cond.tau_i[i], cond.tau_i[1] - cond.tau_i[0]};
        return std::pair{0.0, cond.tau_i[1] - cond.tau_i[0]};
    };
    const auto [t1, step] = period_of(2.0e13);
    const auto [t2, step2] = period_of(4.0e13);
    CHECK(std::abs(t1 - 2.0 * t2) <= 2.0 * (step + step2));
}

TEST_CASE("randomized antisymmetric profiles satisfy duality and parseval") {
    std::mt19937 rng(314159);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto grid = symmetric_grid(0.0, 1.6e14, 768);
    for (int trial = 0; trial < 20; ++trial) {
        const double peak = 1.5e13 + 4e13 * uni(rng);
        const double sigma = 3e12 + 6e12 * uni(rng);
        auto f = gaussian_peak(grid, peak, sigma);
        const std::size_t n = grid.size();
        JointSpectralAmplitude jsa;
        jsa.mode = JointSpectralAmplitude::Mode::cw_slice;
        jsa.scheme = SchemeConfig::scheme1_all_p(2.0 * kOmega0, 0.0);
        jsa.omega_s.resize(n);
        for (std::size_t i = 0; i < n; ++i) jsa.omega_s[i] = kOmega0 + grid[i];
        jsa.amp.resize(n);
        for (std::size_t i = 0; i < n; ++i) jsa.amp[i] = f[i] - f[n - 1 - i];
        const auto ta = temporal_amplitude(jsa);
        CHECK(ta.time_norm_sq == doctest::Approx(ta.freq_norm_sq).epsilon(1e-6));
        // g hermitian symmetry on the same profile
        const auto p = make_profile(grid, jsa.amp, kOmega0, kOmega0);
        const auto tau = symmetric_grid(0.0, 1.5e-13, 64);
        const auto g = g_function(p, tau);
        for (std::size_t i = 0; i < tau.size(); ++i)
            CHECK(std::abs(g.g[i] - std::conj(g.g[tau.size() - 1 - i])) <= 1e-10 * std::abs(g.g0));
    }
}
