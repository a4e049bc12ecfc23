#include "pbg/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace pbg {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {lo};
    std::vector<double> x(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        x[i] = lo + static_cast<double>(i) * step;
    x.back() = hi;
    return x;
}

std::vector<double> symmetric_grid(double center, double half_span, std::size_t half) {
    std::vector<double> x(2 * half + 1);
    const double step = half_span / static_cast<double>(half);
    for (std::size_t i = 0; i <= 2 * half; ++i) {
        const auto j = static_cast<long>(i) - static_cast<long>(half);
        x[i] = center + static_cast<double>(j) * step;
    }
    return x;
}

bool strictly_increasing(std::span<const double> x) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) return false;
    return true;
}

double uniformity_error(std::span<const double> x) {
    if (x.size() < 3) return 0.0;
    const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    double worst = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        worst = std::max(worst, std::abs((x[i] - x[i - 1]) - step));
    return worst / std::abs(step);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("trapezoid: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

std::vector<double> trapezoid_weights(std::span<const double> x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double h = 0.5 * (x[i] - x[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    return w;
}

double trapezoid_norm_sq(std::span<const double> x, std::span<const std::complex<double>> y) {
    if (x.size() != y.size()) throw std::invalid_argument("trapezoid_norm_sq: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (std::norm(y[i]) + std::norm(y[i - 1]));
    return s;
}

} // namespace pbg
