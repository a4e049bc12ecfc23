#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pbg {

// count points from lo to hi inclusive; symmetric grids come out exactly
// symmetric because offsets are integer multiples of the step.
std::vector<double> linspace(double lo, double hi, std::size_t count);

// Grid symmetric about `center` with `half` points on each side.
std::vector<double> symmetric_grid(double center, double half_span, std::size_t half);

bool strictly_increasing(std::span<const double> x);

// Relative spacing deviation from uniformity; 0 for size < 3.
double uniformity_error(std::span<const double> x);

double trapezoid(std::span<const double> x, std::span<const double> y);

// Trapezoid quadrature weights for an arbitrary increasing grid.
std::vector<double> trapezoid_weights(std::span<const double> x);

double trapezoid_norm_sq(std::span<const double> x, std::span<const std::complex<double>> y);

} // namespace pbg
