#include "hmcf/diagnostics.hpp"

#include "hmcf/hmcf_solver.hpp"
#include "hmcf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hmcf {

DiagnosticsRecord record(const SupportState& state, double /*d*/) {
    const ThetaGrid& grid = state.grid;
    const int n = grid.size();
    const SupportProfile profile = to_profile(state);
    const std::vector<double> radius = convexity_radius(profile);
    const std::vector<double> p_th = deriv_theta(grid, state.p, 1);

    DiagnosticsRecord r;
    r.t = state.t;
    r.L = length(profile);
    r.A = area(profile);
    r.width = width_max(profile);

    double min_radius = radius[0];
    double max_radius = radius[0];
    double grad = 0.0;
    for (int j = 0; j < n; ++j) {
        min_radius = std::min(min_radius, radius[j]);
        max_radius = std::max(max_radius, radius[j]);
        grad = std::max(grad, std::abs(p_th[j]));
    }
    r.k_min = 1.0 / max_radius;
    r.k_max = 1.0 / min_radius;
    r.conv_margin = min_radius;
    r.grad_bound = grad;
    r.isoper = r.L * r.L / (4.0 * std::numbers::pi * r.A);

    std::vector<double> tmp(n);
    r.dL_dt_identity = integrate(grid, state.p);
    for (int j = 0; j < n; ++j) tmp[j] = (p_th[j] * p_th[j] - 1.0) / radius[j];
    r.d2L_dt2_identity = integrate(grid, tmp);
    for (int j = 0; j < n; ++j) tmp[j] = state.p[j] * radius[j];
    r.dA_dt_identity = integrate(grid, tmp);
    for (int j = 0; j < n; ++j) tmp[j] = state.p[j] * state.p[j];
    r.d2A_dt2_identity = -2.0 * std::numbers::pi + integrate(grid, tmp);
    for (int j = 0; j < n; ++j) {
        tmp[j] = 2.0 * state.p[j] * (p_th[j] * p_th[j] - 1.0) / radius[j];
    }
    r.d3A_dt3_identity = integrate(grid, tmp);
    return r;
}

namespace {

constexpr std::size_t kStencil = 5;
constexpr std::size_t kHalf = kStencil / 2;

struct StencilWeights {
    std::vector<double> d1, d2, d3;
};

StencilWeights weights_at(const Trajectory& traj, std::size_t i) {
    std::array<double, kStencil> ts{};
    for (std::size_t j = 0; j < kStencil; ++j) ts[j] = traj.records[i - kHalf + j].t;
    StencilWeights w;
    w.d1 = fd_weights(ts, ts[kHalf], 1);
    w.d2 = fd_weights(ts, ts[kHalf], 2);
    w.d3 = fd_weights(ts, ts[kHalf], 3);
    return w;
}

double apply(const std::vector<double>& w, const Trajectory& traj, std::size_t i,
             double DiagnosticsRecord::*field) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kStencil; ++j) {
        acc += w[j] * (traj.records[i - kHalf + j].*field);
    }
    return acc;
}

} // namespace

Trajectory finalize_residuals(Trajectory traj) {
    const std::size_t n = traj.records.size();
    if (n < kStencil) {
        throw TooFewRecordsError("finalize_residuals: need at least " +
                                 std::to_string(kStencil) + " records, have " +
                                 std::to_string(n));
    }
    for (std::size_t i = kHalf; i + kHalf < n; ++i) {
        const StencilWeights w = weights_at(traj, i);
        DiagnosticsRecord& r = traj.records[i];
        r.dL_dt_residual = std::abs(apply(w.d1, traj, i, &DiagnosticsRecord::L) - r.dL_dt_identity);
        r.d2L_dt2_residual =
            std::abs(apply(w.d2, traj, i, &DiagnosticsRecord::L) - r.d2L_dt2_identity);
        r.dA_dt_residual = std::abs(apply(w.d1, traj, i, &DiagnosticsRecord::A) - r.dA_dt_identity);
        r.d2A_dt2_residual =
            std::abs(apply(w.d2, traj, i, &DiagnosticsRecord::A) - r.d2A_dt2_identity);
        r.d3A_dt3_residual =
            std::abs(apply(w.d3, traj, i, &DiagnosticsRecord::A) - r.d3A_dt3_identity);
        r.curvature_pde_residual = curvature_pde_residual(traj, i, traj.d);
    }
    return traj;
}

double curvature_pde_residual(const Trajectory& traj, std::size_t index, double d) {
    const std::size_t n = traj.snapshots.size();
    if (index < kHalf || index + kHalf >= n) {
        throw NotApplicableError("curvature_pde_residual: index " + std::to_string(index) +
                                 " is not interior (needs " + std::to_string(kHalf) +
                                 " neighbours each side of " + std::to_string(n) + " records)");
    }
    const ThetaGrid& grid = traj.snapshots[index].grid;
    const int m = grid.size();

    std::array<double, kStencil> ts{};
    std::array<std::vector<double>, kStencil> ks{};
    for (std::size_t j = 0; j < kStencil; ++j) {
        const SupportState& s = traj.snapshots[index - kHalf + j];
        ts[j] = s.t;
        ks[j] = curvature(to_profile(s));
    }
    const std::vector<double> w1 = fd_weights(ts, ts[kHalf], 1);
    const std::vector<double> w2 = fd_weights(ts, ts[kHalf], 2);

    std::vector<double> k_t(m, 0.0);
    std::vector<double> k_tt(m, 0.0);
    for (std::size_t j = 0; j < kStencil; ++j) {
        for (int i = 0; i < m; ++i) {
            k_t[i] += w1[j] * ks[j][i];
            k_tt[i] += w2[j] * ks[j][i];
        }
    }

    const SupportState& state = traj.snapshots[index];
    const std::vector<double>& k = ks[kHalf];
    const std::vector<double> k_th = deriv_theta(grid, k, 1);
    const std::vector<double> k_thth = deriv_theta(grid, k, 2);
    const std::vector<double> k_th_t = deriv_theta(grid, k_t, 1);
    const std::vector<double> s_th_t = deriv_theta(grid, state.p, 1);

    double res = 0.0;
    for (int i = 0; i < m; ++i) {
        const double st = state.p[i];
        const double sq = s_th_t[i];
        const double kk = k[i];
        const double rhs = kk * kk * (1.0 - sq * sq) * k_thth[i] + 2.0 * kk * sq * k_th_t[i] +
                           4.0 * kk * kk * sq * st * k_th[i] - 4.0 * kk * st * k_t[i] +
                           (sq * sq + 1.0 - 2.0 * st * st) * kk * kk * kk + d * k_t[i];
        res = std::max(res, std::abs(k_tt[i] - rhs));
    }
    return res;
}

bool containment(const SupportState& outer, const SupportState& inner) {
    if (!(outer.grid == inner.grid)) {
        throw GridMismatchError("containment: states live on different grids");
    }
    constexpr double tol = 1e-10;
    for (int j = 0; j < outer.grid.size(); ++j) {
        if (inner.s[j] > outer.s[j] + tol) return false;
    }
    return true;
}

} // namespace hmcf
