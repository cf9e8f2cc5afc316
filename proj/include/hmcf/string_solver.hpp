#pragma once

#include "hmcf/errors.hpp"

#include <string_view>
#include <vector>

namespace hmcf {

/// Parametric string unknowns on the uniform u-grid u_j = 2*pi*j/m:
/// position X = (x, y) and velocity V = X_t = (vx, vy).
struct StringState {
    int m = 0;
    double t = 0.0;
    std::vector<double> x, y;
    std::vector<double> vx, vy;
};

struct StringRhs {
    std::vector<double> x_dot, y_dot;
    std::vector<double> vx_dot, vy_dot;
};

/// Right-hand side of |X_u|^2 X_tt - 2 <X_t, X_u> X_tu + (|X_t|^2 - 1) X_uu = 0
/// solved for X_tt; all u-derivatives spectral. Throws
/// DegenerateParametrizationError where |X_u| vanishes.
StringRhs string_rhs(const StringState& state);

/// Scalars monitored along a string run.
struct StringRecord {
    double t = 0.0;
    double gauge_residual = 0.0;   // max_j |<V, X_u>|
    double timelike_margin = 0.0;  // min_j -[(|V|^2-1)|X_u|^2 - <V,X_u>^2]
    double diameter = 0.0;         // max pairwise node distance
    double min_stretch = 0.0;      // min_j |X_u|
};

enum class StringTermination {
    reached_t_end,
    collapse_detected,
    timelike_lost,
    degenerate_parametrization,
    numerical_failure,
};

std::string_view to_string(StringTermination t);

struct StringTrajectory {
    std::vector<StringRecord> records;
    std::vector<StringState> snapshots;
    StringTermination termination = StringTermination::reached_t_end;
    double t_final = 0.0;
};

/// RK4 + CFL integration of the string equation. The CFL speed bound used is
/// (1 + max_j |V_j|) / min_j |X_u|_j, which dominates both characteristic
/// speeds of the quasilinear operator. Initial data must satisfy the
/// orthogonality gauge |<V, X_u>| <= 1e-12 pointwise and be time-like.
/// Terminates on t_end, collapse (diameter below collapse_diameter), loss of
/// the time-like condition, degenerate parametrization, or non-finite values;
/// the cause is encoded in the trajectory, not thrown.
StringTrajectory string_evolve(const StringState& initial, double cfl, double t_end,
                               int record_every = 4, double collapse_diameter = 1e-3);

/// Circle of radius r0 with radial speed v0 (gauge-compatible for any v0,
/// |v0| < 1 for time-likeness).
StringState make_string_circle(double r0, double v0, int m);

/// Ellipse at rest (V = 0, trivially gauge-compatible).
StringState make_string_ellipse(double a, double b, int m);

} // namespace hmcf
