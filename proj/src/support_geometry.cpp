#include "hmcf/support_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace hmcf {

namespace {

void require_same_size(const ThetaGrid& grid, std::span<const double> v, const char* what) {
    if (static_cast<int>(v.size()) != grid.size()) {
        throw GridMismatchError(std::string(what) + ": sample count does not match grid");
    }
}

} // namespace

std::vector<double> convexity_radius(const SupportProfile& p) {
    require_same_size(p.grid, p.s, "convexity_radius");
    std::vector<double> v = deriv_theta(p.grid, p.s, 2);
    for (int j = 0; j < p.grid.size(); ++j) {
        v[j] += p.s[j];
        if (!std::isfinite(v[j])) {
            throw NumericalFailureError("convexity_radius: non-finite value at node " +
                                        std::to_string(j));
        }
        if (v[j] <= 0.0) {
            throw HyperbolicityLostError("S_thth + S = " + std::to_string(v[j]) +
                                         " <= 0 at node " + std::to_string(j));
        }
    }
    return v;
}

std::vector<double> curvature(const SupportProfile& p) {
    std::vector<double> k = convexity_radius(p);
    for (double& v : k) v = 1.0 / v;
    return k;
}

CurveSample reconstruct(const SupportProfile& p) {
    require_same_size(p.grid, p.s, "reconstruct");
    const int n = p.grid.size();
    const std::vector<double> s_th = deriv_theta(p.grid, p.s, 1);
    CurveSample c{p.grid, std::vector<double>(n), std::vector<double>(n), curvature(p)};
    for (int j = 0; j < n; ++j) {
        const double th = p.grid.node(j);
        const double ct = std::cos(th);
        const double st = std::sin(th);
        c.x[j] = p.s[j] * ct - s_th[j] * st;
        c.y[j] = p.s[j] * st + s_th[j] * ct;
    }
    return c;
}

double length(const SupportProfile& p) {
    const std::vector<double> v = convexity_radius(p);
    const double from_radius = integrate(p.grid, v);
    const double from_support = integrate(p.grid, p.s);
    const double scale = std::max({std::abs(from_radius), std::abs(from_support), 1e-300});
    if (std::abs(from_radius - from_support) > 1e-10 * scale) {
        throw NumericalFailureError("length: integral of (S_thth + S) and integral of S "
                                    "disagree beyond 1e-10 relative");
    }
    return from_radius;
}

double area(const SupportProfile& p) {
    std::vector<double> v = convexity_radius(p);
    for (int j = 0; j < p.grid.size(); ++j) v[j] *= p.s[j];
    return 0.5 * integrate(p.grid, v);
}

double width_max(const SupportProfile& p) {
    require_same_size(p.grid, p.s, "width_max");
    double w = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.grid.size(); ++j) {
        w = std::max(w, p.s[j] + p.s[p.grid.antipode(j)]);
    }
    return w;
}

InitialShape InitialShape::circle(double r0) {
    InitialShape s;
    s.kind = Kind::circle;
    s.r0 = r0;
    return s;
}

InitialShape InitialShape::ellipse(double a, double b) {
    InitialShape s;
    s.kind = Kind::ellipse;
    s.a = a;
    s.b = b;
    return s;
}

InitialShape InitialShape::perturbed(double r0, double eps, int mode) {
    InitialShape s;
    s.kind = Kind::perturbed;
    s.r0 = r0;
    s.eps = eps;
    s.mode = mode;
    return s;
}

InitialVelocity InitialVelocity::constant(double f0) {
    InitialVelocity v;
    v.kind = Kind::constant;
    v.f0 = f0;
    return v;
}

InitialVelocity InitialVelocity::cosine(double f0, double amp, int mode) {
    InitialVelocity v;
    v.kind = Kind::cosine;
    v.f0 = f0;
    v.amp = amp;
    v.mode = mode;
    return v;
}

std::string to_string(InitialShape::Kind kind) {
    switch (kind) {
        case InitialShape::Kind::circle: return "circle";
        case InitialShape::Kind::ellipse: return "ellipse";
        case InitialShape::Kind::perturbed: return "perturbed";
    }
    return "?";
}

std::string to_string(InitialVelocity::Kind kind) {
    switch (kind) {
        case InitialVelocity::Kind::constant: return "constant";
        case InitialVelocity::Kind::cosine: return "cosine";
    }
    return "?";
}

InitialData make_initial(const InitialShape& shape, const InitialVelocity& velocity,
                         const ThetaGrid& grid) {
    const int n = grid.size();
    SupportProfile profile{grid, std::vector<double>(n)};

    switch (shape.kind) {
        case InitialShape::Kind::circle:
            if (shape.r0 <= 0.0) {
                throw InvalidConfigError("circle radius must be positive, got r0 = " +
                                         std::to_string(shape.r0));
            }
            std::fill(profile.s.begin(), profile.s.end(), shape.r0);
            break;
        case InitialShape::Kind::ellipse:
            if (shape.a <= 0.0 || shape.b <= 0.0) {
                throw InvalidConfigError("ellipse semi-axes must be positive");
            }
            for (int j = 0; j < n; ++j) {
                const double th = grid.node(j);
                const double c = std::cos(th);
                const double s = std::sin(th);
                profile.s[j] = std::sqrt(shape.a * shape.a * c * c + shape.b * shape.b * s * s);
            }
            break;
        case InitialShape::Kind::perturbed: {
            if (shape.r0 <= 0.0) {
                throw InvalidConfigError("perturbed base radius must be positive");
            }
            if (shape.mode < 1) {
                throw InvalidConfigError("perturbation mode must be >= 1");
            }
            // S_thth + S = r0 + eps*(1 - m^2)*cos(m*theta), so strict convexity
            // needs |eps|*(m^2 - 1) < r0.
            const double margin =
                shape.r0 - std::abs(shape.eps) * (static_cast<double>(shape.mode) * shape.mode - 1.0);
            if (margin <= 0.0) {
                throw InvalidConfigError(
                    "perturbed profile is not strictly convex: convexity margin "
                    "r0 - |eps|*(m^2-1) = " + std::to_string(margin) + " <= 0");
            }
            for (int j = 0; j < n; ++j) {
                profile.s[j] = shape.r0 + shape.eps * std::cos(shape.mode * grid.node(j));
            }
            break;
        }
    }
    convexity_radius(profile); // sampled data must satisfy the invariant too

    VelocityProfile vel{grid, std::vector<double>(n)};
    double max_grad = 0.0;
    switch (velocity.kind) {
        case InitialVelocity::Kind::constant:
            if (velocity.f0 < 0.0) {
                throw InvalidConfigError("initial speed must be >= 0, got f0 = " +
                                         std::to_string(velocity.f0));
            }
            std::fill(vel.f.begin(), vel.f.end(), velocity.f0);
            break;
        case InitialVelocity::Kind::cosine:
            if (velocity.mode < 1) {
                throw InvalidConfigError("velocity mode must be >= 1");
            }
            for (int j = 0; j < n; ++j) {
                vel.f[j] = velocity.f0 + velocity.amp * std::cos(velocity.mode * grid.node(j));
                if (vel.f[j] < 0.0) {
                    throw InvalidConfigError("initial speed is negative at theta = " +
                                             std::to_string(grid.node(j)));
                }
            }
            max_grad = std::abs(velocity.amp) * velocity.mode;
            break;
    }
    if (max_grad >= 1.0) {
        std::cerr << "warning: initial speed gradient max|f_theta| = " << max_grad
                  << " >= 1; initial data lies outside the light cone and the gradient "
                     "bound |S_theta_t| < 1 is not guaranteed\n";
    }
    return {std::move(profile), std::move(vel)};
}

} // namespace hmcf
