#pragma once

#include "hmcf/theta_grid.hpp"

#include <span>
#include <vector>

namespace hmcf {

/// Trigonometric-interpolant derivative of periodic samples, computed by FFT.
/// Exact (to roundoff) for inputs band-limited below mode n/2. order is 1 or 2.
/// For order 1 the Nyquist mode is dropped, the standard choice for odd
/// derivatives on an even grid.
std::vector<double> deriv_theta(const ThetaGrid& grid, std::span<const double> samples,
                                int order);

/// Trapezoid rule over one period; on this uniform periodic grid it reduces to
/// spacing() * sum and is spectrally accurate for smooth integrands.
double integrate(const ThetaGrid& grid, std::span<const double> samples);

/// Zero all Fourier modes with |k| > n/3 (2/3-rule dealiasing filter).
std::vector<double> dealias_two_thirds(const ThetaGrid& grid, std::span<const double> samples);

/// Finite-difference weights for the m-th derivative at x0 on the arbitrary
/// nodes x (Fornberg's recursion). Exact for polynomials of degree < x.size().
std::vector<double> fd_weights(std::span<const double> x, double x0, int m);

} // namespace hmcf
