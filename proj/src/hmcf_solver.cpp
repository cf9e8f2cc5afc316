#include "hmcf/hmcf_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace hmcf {

namespace {

void check_finite(std::span<const double> v, int stage, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw NumericalFailureError(std::string(what) + " is non-finite (stage " +
                                            std::to_string(stage) + ")",
                                        stage);
        }
    }
}

// S_thth + S with stage-tagged errors for use inside RK stages.
std::vector<double> stage_radius(const ThetaGrid& grid, std::span<const double> s, int stage) {
    std::vector<double> v = deriv_theta(grid, s, 2);
    for (int j = 0; j < grid.size(); ++j) {
        v[j] += s[j];
        if (!std::isfinite(v[j])) {
            throw NumericalFailureError("S_thth + S non-finite at node " + std::to_string(j) +
                                            " (stage " + std::to_string(stage) + ")",
                                        stage);
        }
        if (v[j] <= 0.0) {
            throw HyperbolicityLostError("S_thth + S = " + std::to_string(v[j]) +
                                             " <= 0 at node " + std::to_string(j) + " (stage " +
                                             std::to_string(stage) + ")",
                                         stage);
        }
    }
    return v;
}

FlowRhs rhs_impl(const ThetaGrid& grid, std::span<const double> s, std::span<const double> p,
                 double d, int stage) {
    const int n = grid.size();
    check_finite(p, stage, "P");
    const std::vector<double> radius = stage_radius(grid, s, stage);
    const std::vector<double> p_th = deriv_theta(grid, p, 1);
    FlowRhs out;
    out.s_dot.assign(p.begin(), p.end());
    out.p_dot.resize(n);
    for (int j = 0; j < n; ++j) {
        out.p_dot[j] = (p_th[j] * p_th[j] - 1.0) / radius[j] + d * p[j];
    }
    return out;
}

} // namespace

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::reached_t_end: return "reached_t_end";
        case Termination::collapse_detected: return "collapse_detected";
        case Termination::blowup_detected: return "blowup_detected";
        case Termination::hyperbolicity_lost: return "hyperbolicity_lost";
        case Termination::numerical_failure: return "numerical_failure";
    }
    return "?";
}

void validate(const FlowConfig& config) {
    if (!(config.cfl > 0.0 && config.cfl <= 1.0)) {
        throw InvalidConfigError("cfl must lie in (0, 1], got " + std::to_string(config.cfl));
    }
    if (config.d > 0.0) {
        throw InvalidConfigError("dissipation constant d must be <= 0, got " +
                                 std::to_string(config.d));
    }
    if (!(config.t_end > 0.0)) {
        throw InvalidConfigError("t_end must be positive");
    }
    if (!(config.k_max_limit > 0.0) || !(config.width_min > 0.0)) {
        throw InvalidConfigError("k_max_limit and width_min must be positive");
    }
    if (config.record_every < 1) {
        throw InvalidConfigError("record_every must be >= 1");
    }
    const ThetaGrid grid(config.n);
    make_initial(config.initial, config.velocity, grid);
}

FlowRhs rhs(const SupportState& state, double d) {
    return rhs_impl(state.grid, state.s, state.p, d, -1);
}

double max_char_speed(const SupportState& state) {
    const std::vector<double> radius = stage_radius(state.grid, state.s, -1);
    const std::vector<double> p_th = deriv_theta(state.grid, state.p, 1);
    double speed = 0.0;
    for (int j = 0; j < state.grid.size(); ++j) {
        speed = std::max(speed, (std::abs(p_th[j]) + 1.0) / radius[j]);
    }
    return speed;
}

double cfl_dt(const SupportState& state, double cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw InvalidConfigError("cfl must lie in (0, 1]");
    }
    return cfl * state.grid.spacing() / max_char_speed(state);
}

SupportState step(const SupportState& state, double dt, double d) {
    if (!(dt > 0.0)) {
        throw InvalidConfigError("step: dt must be positive");
    }
    const int n = state.grid.size();
    const ThetaGrid& grid = state.grid;

    std::array<FlowRhs, 4> k;
    std::vector<double> s_tmp(n);
    std::vector<double> p_tmp(n);

    k[0] = rhs_impl(grid, state.s, state.p, d, 0);
    for (int j = 0; j < n; ++j) {
        s_tmp[j] = state.s[j] + 0.5 * dt * k[0].s_dot[j];
        p_tmp[j] = state.p[j] + 0.5 * dt * k[0].p_dot[j];
    }
    k[1] = rhs_impl(grid, s_tmp, p_tmp, d, 1);
    for (int j = 0; j < n; ++j) {
        s_tmp[j] = state.s[j] + 0.5 * dt * k[1].s_dot[j];
        p_tmp[j] = state.p[j] + 0.5 * dt * k[1].p_dot[j];
    }
    k[2] = rhs_impl(grid, s_tmp, p_tmp, d, 2);
    for (int j = 0; j < n; ++j) {
        s_tmp[j] = state.s[j] + dt * k[2].s_dot[j];
        p_tmp[j] = state.p[j] + dt * k[2].p_dot[j];
    }
    k[3] = rhs_impl(grid, s_tmp, p_tmp, d, 3);

    SupportState next{grid, state.t + dt, std::vector<double>(n), std::vector<double>(n)};
    const double w = dt / 6.0;
    for (int j = 0; j < n; ++j) {
        next.s[j] = state.s[j] +
                    w * (k[0].s_dot[j] + 2.0 * k[1].s_dot[j] + 2.0 * k[2].s_dot[j] + k[3].s_dot[j]);
        next.p[j] = state.p[j] +
                    w * (k[0].p_dot[j] + 2.0 * k[1].p_dot[j] + 2.0 * k[2].p_dot[j] + k[3].p_dot[j]);
    }
    check_finite(next.s, 4, "S");
    check_finite(next.p, 4, "P");
    stage_radius(grid, next.s, 4);
    return next;
}

SupportState initial_state(const FlowConfig& config) {
    const ThetaGrid grid(config.n);
    InitialData data = make_initial(config.initial, config.velocity, grid);
    SupportState state{grid, 0.0, std::move(data.shape.s), std::move(data.velocity.f)};
    for (double& v : state.p) v = -v; // S_t(theta, 0) = -f(theta)
    return state;
}

Trajectory evolve(const FlowConfig& config) {
    validate(config);
    SupportState state = initial_state(config);

    Trajectory traj;
    traj.d = config.d;
    traj.records.push_back(record(state, config.d));
    traj.snapshots.push_back(state);

    auto record_state = [&](const SupportState& s) {
        if (!traj.records.empty() && traj.records.back().t == s.t) return;
        traj.records.push_back(record(s, config.d));
        traj.snapshots.push_back(s);
    };

    const double t_eps = 1e-13 * std::max(1.0, config.t_end);
    long steps = 0;
    Termination termination = Termination::reached_t_end;

    while (config.t_end - state.t > t_eps) {
        double dt;
        try {
            dt = cfl_dt(state, config.cfl);
        } catch (const HyperbolicityLostError&) {
            termination = Termination::hyperbolicity_lost;
            break;
        }
        dt = std::min(dt, config.t_end - state.t);
        if (dt < 1e-14 * (1.0 + state.t)) {
            // time has effectively stopped advancing
            termination = Termination::numerical_failure;
            break;
        }

        SupportState next{state.grid, 0.0, {}, {}};
        try {
            next = step(state, dt, config.d);
        } catch (const HyperbolicityLostError&) {
            termination = Termination::hyperbolicity_lost;
            break;
        } catch (const NumericalFailureError&) {
            termination = Termination::numerical_failure;
            break;
        }
        if (config.dealias) {
            next.s = dealias_two_thirds(next.grid, next.s);
            next.p = dealias_two_thirds(next.grid, next.p);
        }
        state = std::move(next);
        ++steps;

        if (steps % config.record_every == 0) record_state(state);

        // termination checks on the freshly accepted state
        DiagnosticsRecord probe;
        try {
            probe = record(state, config.d);
        } catch (const HyperbolicityLostError&) {
            termination = Termination::hyperbolicity_lost;
            break;
        } catch (const NumericalFailureError&) {
            termination = Termination::numerical_failure;
            break;
        }
        const bool tiny_width = probe.width <= config.width_min;
        const bool k_exploded = probe.k_max >= config.k_max_limit;
        if (tiny_width || (k_exploded && probe.width <= 10.0 * config.width_min)) {
            termination = Termination::collapse_detected;
            record_state(state);
            break;
        }
        if (k_exploded) {
            termination = Termination::blowup_detected;
            record_state(state);
            break;
        }
    }

    if (termination == Termination::reached_t_end ||
        termination == Termination::hyperbolicity_lost ||
        termination == Termination::numerical_failure) {
        // the last valid state closes the trajectory
        try {
            record_state(state);
        } catch (const Error&) {
            // state itself is no longer recordable; keep what we have
        }
    }
    traj.termination = termination;
    traj.t_final = traj.records.back().t;
    return traj;
}

namespace {

// Smallest root >= t0 of the least-squares quadratic through the points
// (t_i - t0, y_i). Falls back to the secant root when the fit has no real
// root ahead of t0.
double extrapolated_root(std::span<const double> ts, std::span<const double> ys, double t0) {
    const int m = static_cast<int>(ts.size());
    // normal equations for y = c0 + c1*x + c2*x^2
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double b0 = 0, b1 = 0, b2 = 0;
    for (int i = 0; i < m; ++i) {
        const double x = ts[i] - t0;
        const double x2 = x * x;
        s0 += 1.0;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        b0 += ys[i];
        b1 += ys[i] * x;
        b2 += ys[i] * x2;
    }
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) +
                       s2 * (s1 * s3 - s2 * s2);
    double c0 = 0, c1 = 0, c2 = 0;
    if (std::abs(det) > 1e-300) {
        c0 = (b0 * (s2 * s4 - s3 * s3) - s1 * (b1 * s4 - s3 * b2) + s2 * (b1 * s3 - s2 * b2)) / det;
        c1 = (s0 * (b1 * s4 - b2 * s3) - b0 * (s1 * s4 - s3 * s2) + s2 * (s1 * b2 - b1 * s2)) / det;
        c2 = (s0 * (s2 * b2 - s3 * b1) - s1 * (s1 * b2 - s3 * b0) + b0 * (s1 * s3 - s2 * s2)) / det;
    }
    const double tiny = -1e-12 * std::max(1.0, std::abs(t0));
    if (std::abs(c2) > 1e-300) {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double r1 = (-c1 + sq) / (2.0 * c2);
            const double r2 = (-c1 - sq) / (2.0 * c2);
            double best = std::numeric_limits<double>::infinity();
            if (r1 >= tiny) best = std::min(best, r1);
            if (r2 >= tiny) best = std::min(best, r2);
            if (std::isfinite(best)) return t0 + best;
        }
    }
    // secant through the last two points
    const double dy = ys[m - 1] - ys[m - 2];
    const double dx = ts[m - 1] - ts[m - 2];
    if (std::abs(dy) > 1e-300) {
        const double root = ts[m - 1] - ys[m - 1] * dx / dy;
        if (root >= t0 + tiny) return root;
    }
    return t0;
}

} // namespace

CollapseEstimate estimate_collapse_time(const Trajectory& traj) {
    if (traj.termination != Termination::collapse_detected) {
        throw NotApplicableError("estimate_collapse_time: trajectory did not collapse "
                                 "(termination = " + std::string(to_string(traj.termination)) +
                                 ")");
    }
    if (traj.records.size() < 4) {
        throw NotApplicableError("estimate_collapse_time: need at least 4 records");
    }
    const std::size_t n = traj.records.size();
    std::array<double, 4> ts{}, ws{}, ls{};
    for (std::size_t i = 0; i < 4; ++i) {
        const DiagnosticsRecord& r = traj.records[n - 4 + i];
        ts[i] = r.t;
        ws[i] = r.width;
        ls[i] = r.L;
    }
    const double t0 = ts[3];
    const double root_w = extrapolated_root(ts, ws, t0);
    const double root_l = extrapolated_root(ts, ls, t0);
    return {0.5 * (root_w + root_l), 0.5 * std::abs(root_w - root_l)};
}

} // namespace hmcf
