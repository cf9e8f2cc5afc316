#pragma once

#include "hmcf/spectral.hpp"
#include "hmcf/theta_grid.hpp"

#include <span>
#include <string>
#include <vector>

namespace hmcf {

/// Support function samples S(theta_j) of a strictly convex closed curve.
/// Strict convexity means S_thth + S > 0 at every node; that quantity is the
/// curvature radius 1/k.
struct SupportProfile {
    ThetaGrid grid;
    std::vector<double> s;
};

/// Initial normal speed samples f(theta_j) >= 0 (directed along the inner
/// normal; the solver sets S_t(theta, 0) = -f).
struct VelocityProfile {
    ThetaGrid grid;
    std::vector<double> f;
};

/// Euclidean reconstruction of a support profile: points and curvature per node.
/// The outward normal at node j is (cos theta_j, sin theta_j).
struct CurveSample {
    ThetaGrid grid;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> k;
};

/// S_thth + S per node (the curvature radius). Throws HyperbolicityLostError
/// if it is non-positive anywhere.
std::vector<double> convexity_radius(const SupportProfile& p);

/// Curvature k_j = 1 / (S_thth + S)_j.
std::vector<double> curvature(const SupportProfile& p);

/// x = S cos(theta) - S_th sin(theta), y = S sin(theta) + S_th cos(theta).
CurveSample reconstruct(const SupportProfile& p);

/// Arclength of the closed curve: integral of (S_thth + S). The equivalent
/// form integral of S is computed as well and both must agree to 1e-10
/// relative, as an internal consistency check.
double length(const SupportProfile& p);

/// Enclosed area: 1/2 * integral of S * (S_thth + S).
double area(const SupportProfile& p);

/// Maximal width max_j (S(theta_j) + S(theta_j + pi)). Zero exactly when the
/// convex body has degenerated to a point.
double width_max(const SupportProfile& p);

/// Initial curve families.
struct InitialShape {
    enum class Kind { circle, ellipse, perturbed };
    Kind kind = Kind::circle;
    double r0 = 1.0;     // circle / perturbed base radius
    double a = 1.0;      // ellipse semi-axes
    double b = 1.0;
    double eps = 0.0;    // perturbed: S = r0 + eps*cos(mode*theta)
    int mode = 2;

    static InitialShape circle(double r0);
    static InitialShape ellipse(double a, double b);
    static InitialShape perturbed(double r0, double eps, int mode);
};

/// Initial normal speed families.
struct InitialVelocity {
    enum class Kind { constant, cosine };
    Kind kind = Kind::constant;
    double f0 = 0.0;     // constant level
    double amp = 0.0;    // cosine: f = f0 + amp*cos(mode*theta)
    int mode = 1;

    static InitialVelocity constant(double f0);
    static InitialVelocity cosine(double f0, double amp, int mode);
};

struct InitialData {
    SupportProfile shape;
    VelocityProfile velocity;
};

/// Sample the initial curve and speed on the grid. Rejects parameter sets that
/// break strict convexity or make the speed negative anywhere. Writes a warning
/// to stderr when max|f_theta| >= 1, since the flow's gradient bound is only
/// guaranteed for initial data inside the light cone.
InitialData make_initial(const InitialShape& shape, const InitialVelocity& velocity,
                         const ThetaGrid& grid);

std::string to_string(InitialShape::Kind kind);
std::string to_string(InitialVelocity::Kind kind);

} // namespace hmcf
