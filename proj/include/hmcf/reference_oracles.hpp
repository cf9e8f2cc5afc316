#pragma once

#include <optional>
#include <vector>

namespace hmcf {

/// High-accuracy radial solution R(t) of one of the circle reductions,
/// sampled at the integrator's accepted steps (last sample exactly at t_end
/// when the run reaches it). collapse_time is the event-located time at which
/// R reaches zero, present only if that happens before t_end.
struct RadialSolution {
    std::vector<double> times;
    std::vector<double> radius;
    std::vector<double> speed;  // R'(t)
    std::optional<double> collapse_time;
};

/// Circle under the flow: R'' = -1/R + d R', R(0) = r0 > 0, R'(0) = r1.
/// Integrated with an adaptive embedded Runge-Kutta pair (local tolerance
/// 1e-12); R -> 0 is located by bisection on the dense-output interpolant.
/// Integration halts at R = 1e-6 r0 and the remaining sliver of time is
/// added via the energy integral 1/2 R'^2 + ln R = const frozen at the halt
/// point (for d != 0 the correction over that sliver is far below 1e-12).
RadialSolution circle_flow(double r0, double r1, double d, double t_end);

/// Collapse time of the undamped circle from the energy integral,
///   T = integral_0^r0 dR / sqrt(r1^2 - 2 ln(R/r0)),   r1 <= 0,
/// evaluated by adaptive quadrature after the substitution
/// u = sqrt(r1^2 + 2 ln(r0/R)) which removes the integrable endpoint.
double collapse_time_quadrature(double r0, double r1);

/// Circle under the string equation: R'' = (R'^2 - 1)/R, |r1| < 1.
/// Same integration and event machinery as circle_flow; the remaining time
/// after the halt radius comes from the first integral (1 - R'^2)/R^2 = const.
RadialSolution string_circle(double r0, double r1, double t_end);

} // namespace hmcf
