#pragma once

#include "hmcf/diagnostics.hpp"
#include "hmcf/support_geometry.hpp"

#include <string_view>
#include <vector>

namespace hmcf {

/// Flow unknowns on the periodic grid: S and P = S_t, plus the current time.
struct SupportState {
    ThetaGrid grid;
    double t = 0.0;
    std::vector<double> s;
    std::vector<double> p;
};

/// View of the state's support samples as a profile.
inline SupportProfile to_profile(const SupportState& state) {
    return SupportProfile{state.grid, state.s};
}

enum class Termination {
    reached_t_end,
    collapse_detected,
    blowup_detected,
    hyperbolicity_lost,
    numerical_failure,
};

std::string_view to_string(Termination t);

/// Full description of one flow run.
struct FlowConfig {
    InitialShape initial;
    InitialVelocity velocity;
    int n = 128;
    double cfl = 0.5;           // in (0, 1]
    double d = 0.0;             // dissipation constant, <= 0; 0 recovers the plain flow
    double t_end = 10.0;
    double k_max_limit = 1e4;   // blow-up threshold
    double width_min = 1e-3;    // point-collapse threshold
    int record_every = 4;       // diagnostic cadence in accepted steps
    bool dealias = false;       // optional 2/3-rule filter after each step
};

void validate(const FlowConfig& config);

struct Trajectory {
    std::vector<DiagnosticsRecord> records;
    std::vector<SupportState> snapshots;  // states at the recording cadence
    Termination termination = Termination::reached_t_end;
    double t_final = 0.0;
    double d = 0.0;  // dissipation constant of the run, for the residual ops
};

struct FlowRhs {
    std::vector<double> s_dot;
    std::vector<double> p_dot;
};

/// Right-hand side of the first-order system:
///   S_t = P,   P_t = (P_theta^2 - 1) / (S_thth + S) + d * P.
FlowRhs rhs(const SupportState& state, double d);

/// Upper bound on the characteristic speeds k*S_theta_t +- k:
/// max_j k_j * (|P_theta|_j + 1).
double max_char_speed(const SupportState& state);

/// cfl * dtheta / max_char_speed(state).
double cfl_dt(const SupportState& state, double cfl);

/// One classical RK4 step. Throws HyperbolicityLostError or
/// NumericalFailureError carrying the stage (0..3, or 4 for the post-step
/// validation of the combined state).
SupportState step(const SupportState& state, double dt, double d);

/// Build the state at t = 0: S = h, P = -f.
SupportState initial_state(const FlowConfig& config);

/// Integrate until t_end, collapse, blow-up, hyperbolicity loss or numerical
/// failure, recording diagnostics every record_every accepted steps and always
/// at the initial and terminal states. A pure function of the config:
/// identical configs produce bit-identical trajectories.
Trajectory evolve(const FlowConfig& config);

struct CollapseEstimate {
    double value = 0.0;
    double uncertainty = 0.0;
};

/// Root of a quadratic extrapolation through the last four records, applied to
/// both width(t) and L(t); returns the midpoint of the two roots with half
/// their spread as the uncertainty. Requires a collapse_detected trajectory
/// with at least four records.
CollapseEstimate estimate_collapse_time(const Trajectory& traj);

} // namespace hmcf
