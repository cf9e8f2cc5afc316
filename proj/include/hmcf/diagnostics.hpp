#pragma once

#include <cstddef>
#include <optional>

namespace hmcf {

struct SupportState;
struct Trajectory;

/// One time-series row of monitored scalars.
///
/// The *_identity fields hold the instantaneous integral identities evaluated
/// on the state itself:
///   dL/dt    =  integral S_t
///   d2L/dt2  =  integral (S_theta_t^2 - 1) k
///   dA/dt    =  integral S_t / k
///   d2A/dt2  =  -2*pi + integral S_t^2
///   d3A/dt3  =  2 * integral S_t (S_theta_t^2 - 1) k
///
/// The *_residual fields are filled by finalize_residuals: the absolute
/// deviation between a centered finite-difference estimate from the recorded
/// L(t), A(t) series and the identity value stored here. They stay empty for
/// boundary records that lack a full differencing stencil.
struct DiagnosticsRecord {
    double t = 0.0;
    double L = 0.0;
    double A = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
    double grad_bound = 0.0;   // max_j |S_theta_t|
    double conv_margin = 0.0;  // min_j (S_thth + S)
    double width = 0.0;        // width_max
    double isoper = 0.0;       // L^2 / (4*pi*A)

    double dL_dt_identity = 0.0;
    double d2L_dt2_identity = 0.0;
    double dA_dt_identity = 0.0;
    double d2A_dt2_identity = 0.0;
    double d3A_dt3_identity = 0.0;

    std::optional<double> dL_dt_residual;
    std::optional<double> d2L_dt2_residual;
    std::optional<double> dA_dt_residual;
    std::optional<double> d2A_dt2_residual;
    std::optional<double> d3A_dt3_residual;
    std::optional<double> curvature_pde_residual;
};

/// Compute every monitored scalar from one state. d is the dissipation
/// constant of the run (it does not enter any instantaneous identity here but
/// is kept in the signature for symmetry with the residual operations).
DiagnosticsRecord record(const SupportState& state, double d);

/// Fill the residual fields of every interior record (index 2..N-3) using
/// five-point centered differencing on the recorded series, the identity
/// values stored in the records, and the curvature equation residual below.
/// Needs at least five records.
Trajectory finalize_residuals(Trajectory traj);

/// Max-norm residual of the curvature evolution equation
///   k_tt = k^2 (1 - S_theta_t^2) k_thth + 2 k S_theta_t k_th_t
///          + 4 k^2 S_theta_t S_t k_th - 4 k S_t k_t
///          + (S_theta_t^2 + 1 - 2 S_t^2) k^3 + d k_t
/// at the given record index. Time derivatives of k use five-point centered
/// differencing over neighbouring snapshots, space derivatives are spectral.
/// The index must be interior (2..N-3).
double curvature_pde_residual(const Trajectory& traj, std::size_t index, double d);

/// Support-function characterization of convex-body containment about a
/// common origin: true iff inner S <= outer S + 1e-10 at every node.
bool containment(const SupportState& outer, const SupportState& inner);

} // namespace hmcf
