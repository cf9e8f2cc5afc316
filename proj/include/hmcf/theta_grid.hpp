#pragma once

#include "hmcf/errors.hpp"

#include <numbers>

namespace hmcf {

/// Uniform periodic grid of normal angles theta_j = 2*pi*j/n, j = 0..n-1.
/// n must be even (so the antipodal node theta_j + pi is a grid node) and
/// at least 16 (so the spectral differentiation has modes to work with).
class ThetaGrid {
  public:
    explicit ThetaGrid(int n) : n_(n) {
        if (n < 16 || n % 2 != 0) {
            throw InvalidConfigError("grid size must be even and >= 16, got " +
                                     std::to_string(n));
        }
    }

    int size() const { return n_; }
    double spacing() const { return 2.0 * std::numbers::pi / n_; }
    double node(int j) const { return spacing() * j; }
    int antipode(int j) const { return (j + n_ / 2) % n_; }

    bool operator==(const ThetaGrid&) const = default;

  private:
    int n_;
};

} // namespace hmcf
