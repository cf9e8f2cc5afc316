#include "hmcf/string_solver.hpp"

#include "hmcf/spectral.hpp"
#include "hmcf/theta_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace hmcf {

namespace {

void check_sizes(const StringState& state) {
    const std::size_t m = static_cast<std::size_t>(state.m);
    if (state.x.size() != m || state.y.size() != m || state.vx.size() != m ||
        state.vy.size() != m) {
        throw GridMismatchError("string state arrays do not match m");
    }
}

bool all_finite(const StringState& s) {
    auto ok = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return ok(s.x) && ok(s.y) && ok(s.vx) && ok(s.vy);
}

struct StringGeometry {
    std::vector<double> xu, yu;    // X_u
    std::vector<double> g;         // |X_u|^2
    std::vector<double> v_dot_xu;  // <V, X_u>
    std::vector<double> v2;        // |V|^2
};

StringGeometry geometry(const ThetaGrid& grid, const StringState& s) {
    StringGeometry geo;
    geo.xu = deriv_theta(grid, s.x, 1);
    geo.yu = deriv_theta(grid, s.y, 1);
    const int m = grid.size();
    geo.g.resize(m);
    geo.v_dot_xu.resize(m);
    geo.v2.resize(m);
    double g_max = 0.0;
    for (int j = 0; j < m; ++j) {
        geo.g[j] = geo.xu[j] * geo.xu[j] + geo.yu[j] * geo.yu[j];
        g_max = std::max(g_max, geo.g[j]);
        geo.v_dot_xu[j] = s.vx[j] * geo.xu[j] + s.vy[j] * geo.yu[j];
        geo.v2[j] = s.vx[j] * s.vx[j] + s.vy[j] * s.vy[j];
    }
    for (int j = 0; j < m; ++j) {
        // relative threshold: an exactly flat parametrization has g = 0 at
        // isolated nodes only up to FFT roundoff
        if (geo.g[j] <= 1e-20 * g_max) {
            throw DegenerateParametrizationError("|X_u| vanishes at node " + std::to_string(j));
        }
    }
    return geo;
}

StringRhs rhs_impl(const ThetaGrid& grid, const StringState& s) {
    const int m = grid.size();
    const StringGeometry geo = geometry(grid, s);
    const std::vector<double> xuu = deriv_theta(grid, s.x, 2);
    const std::vector<double> yuu = deriv_theta(grid, s.y, 2);
    const std::vector<double> vxu = deriv_theta(grid, s.vx, 1);
    const std::vector<double> vyu = deriv_theta(grid, s.vy, 1);

    StringRhs out;
    out.x_dot = s.vx;
    out.y_dot = s.vy;
    out.vx_dot.resize(m);
    out.vy_dot.resize(m);
    for (int j = 0; j < m; ++j) {
        const double c = geo.v2[j] - 1.0;
        out.vx_dot[j] = (2.0 * geo.v_dot_xu[j] * vxu[j] - c * xuu[j]) / geo.g[j];
        out.vy_dot[j] = (2.0 * geo.v_dot_xu[j] * vyu[j] - c * yuu[j]) / geo.g[j];
    }
    return out;
}

StringRecord observe(const ThetaGrid& grid, const StringState& s) {
    const StringGeometry geo = geometry(grid, s);
    const int m = grid.size();
    StringRecord r;
    r.t = s.t;
    double gauge = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    double min_g = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        gauge = std::max(gauge, std::abs(geo.v_dot_xu[j]));
        margin = std::min(margin, -((geo.v2[j] - 1.0) * geo.g[j] -
                                    geo.v_dot_xu[j] * geo.v_dot_xu[j]));
        min_g = std::min(min_g, geo.g[j]);
    }
    r.gauge_residual = gauge;
    r.timelike_margin = margin;
    r.min_stretch = std::sqrt(min_g);
    double diam2 = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double dx = s.x[i] - s.x[j];
            const double dy = s.y[i] - s.y[j];
            diam2 = std::max(diam2, dx * dx + dy * dy);
        }
    }
    r.diameter = std::sqrt(diam2);
    return r;
}

double cfl_speed(const ThetaGrid& grid, const StringState& s) {
    const StringGeometry geo = geometry(grid, s);
    double vmax = 0.0;
    double gmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.size(); ++j) {
        vmax = std::max(vmax, geo.v2[j]);
        gmin = std::min(gmin, geo.g[j]);
    }
    return (1.0 + std::sqrt(vmax)) / std::sqrt(gmin);
}

StringState rk4_step(const ThetaGrid& grid, const StringState& s, double dt) {
    const int m = grid.size();
    std::array<StringRhs, 4> k;
    StringState tmp = s;

    k[0] = rhs_impl(grid, s);
    for (int j = 0; j < m; ++j) {
        tmp.x[j] = s.x[j] + 0.5 * dt * k[0].x_dot[j];
        tmp.y[j] = s.y[j] + 0.5 * dt * k[0].y_dot[j];
        tmp.vx[j] = s.vx[j] + 0.5 * dt * k[0].vx_dot[j];
        tmp.vy[j] = s.vy[j] + 0.5 * dt * k[0].vy_dot[j];
    }
    k[1] = rhs_impl(grid, tmp);
    for (int j = 0; j < m; ++j) {
        tmp.x[j] = s.x[j] + 0.5 * dt * k[1].x_dot[j];
        tmp.y[j] = s.y[j] + 0.5 * dt * k[1].y_dot[j];
        tmp.vx[j] = s.vx[j] + 0.5 * dt * k[1].vx_dot[j];
        tmp.vy[j] = s.vy[j] + 0.5 * dt * k[1].vy_dot[j];
    }
    k[2] = rhs_impl(grid, tmp);
    for (int j = 0; j < m; ++j) {
        tmp.x[j] = s.x[j] + dt * k[2].x_dot[j];
        tmp.y[j] = s.y[j] + dt * k[2].y_dot[j];
        tmp.vx[j] = s.vx[j] + dt * k[2].vx_dot[j];
        tmp.vy[j] = s.vy[j] + dt * k[2].vy_dot[j];
    }
    k[3] = rhs_impl(grid, tmp);

    StringState next = s;
    next.t = s.t + dt;
    const double w = dt / 6.0;
    for (int j = 0; j < m; ++j) {
        next.x[j] = s.x[j] + w * (k[0].x_dot[j] + 2 * k[1].x_dot[j] + 2 * k[2].x_dot[j] + k[3].x_dot[j]);
        next.y[j] = s.y[j] + w * (k[0].y_dot[j] + 2 * k[1].y_dot[j] + 2 * k[2].y_dot[j] + k[3].y_dot[j]);
        next.vx[j] = s.vx[j] + w * (k[0].vx_dot[j] + 2 * k[1].vx_dot[j] + 2 * k[2].vx_dot[j] + k[3].vx_dot[j]);
        next.vy[j] = s.vy[j] + w * (k[0].vy_dot[j] + 2 * k[1].vy_dot[j] + 2 * k[2].vy_dot[j] + k[3].vy_dot[j]);
    }
    return next;
}

} // namespace

std::string_view to_string(StringTermination t) {
    switch (t) {
        case StringTermination::reached_t_end: return "reached_t_end";
        case StringTermination::collapse_detected: return "collapse_detected";
        case StringTermination::timelike_lost: return "timelike_lost";
        case StringTermination::degenerate_parametrization: return "degenerate_parametrization";
        case StringTermination::numerical_failure: return "numerical_failure";
    }
    return "?";
}

StringRhs string_rhs(const StringState& state) {
    check_sizes(state);
    return rhs_impl(ThetaGrid(state.m), state);
}

StringTrajectory string_evolve(const StringState& initial, double cfl, double t_end,
                               int record_every, double collapse_diameter) {
    check_sizes(initial);
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw InvalidConfigError("string_evolve: cfl must lie in (0, 1]");
    }
    if (!(t_end > 0.0) || record_every < 1 || !(collapse_diameter > 0.0)) {
        throw InvalidConfigError("string_evolve: bad t_end, record_every or collapse_diameter");
    }
    const ThetaGrid grid(initial.m);

    StringRecord r0 = observe(grid, initial);
    if (r0.gauge_residual > 1e-12) {
        throw InvalidConfigError("string_evolve: initial data violates the orthogonality "
                                 "gauge, max |<V, X_u>| = " + std::to_string(r0.gauge_residual));
    }
    if (!(r0.timelike_margin > 0.0)) {
        throw TimelikeViolationError("string_evolve: initial data is not time-like");
    }

    StringTrajectory traj;
    StringState state = initial;
    state.t = 0.0;
    r0.t = 0.0;
    traj.records.push_back(r0);
    traj.snapshots.push_back(state);

    auto record_state = [&](const StringState& s, const StringRecord& r) {
        if (!traj.records.empty() && traj.records.back().t == s.t) return;
        traj.records.push_back(r);
        traj.snapshots.push_back(s);
    };

    const double t_eps = 1e-13 * std::max(1.0, t_end);
    long steps = 0;
    StringTermination termination = StringTermination::reached_t_end;

    while (t_end - state.t > t_eps) {
        double dt;
        try {
            dt = cfl * grid.spacing() / cfl_speed(grid, state);
        } catch (const DegenerateParametrizationError&) {
            termination = StringTermination::degenerate_parametrization;
            break;
        }
        dt = std::min(dt, t_end - state.t);
        if (dt < 1e-14 * (1.0 + state.t)) {
            termination = StringTermination::numerical_failure;
            break;
        }

        StringState next;
        try {
            next = rk4_step(grid, state, dt);
        } catch (const DegenerateParametrizationError&) {
            termination = StringTermination::degenerate_parametrization;
            break;
        }
        if (!all_finite(next)) {
            termination = StringTermination::numerical_failure;
            break;
        }
        state = std::move(next);
        ++steps;

        StringRecord rec;
        try {
            rec = observe(grid, state);
        } catch (const DegenerateParametrizationError&) {
            termination = StringTermination::degenerate_parametrization;
            break;
        }
        if (steps % record_every == 0) record_state(state, rec);

        if (rec.diameter <= collapse_diameter) {
            termination = StringTermination::collapse_detected;
            record_state(state, rec);
            break;
        }
        if (!(rec.timelike_margin > 0.0)) {
            termination = StringTermination::timelike_lost;
            record_state(state, rec);
            break;
        }
    }

    if (termination == StringTermination::reached_t_end ||
        termination == StringTermination::degenerate_parametrization ||
        termination == StringTermination::numerical_failure) {
        try {
            record_state(state, observe(grid, state));
        } catch (const Error&) {
        }
    }
    traj.termination = termination;
    traj.t_final = traj.records.back().t;
    return traj;
}

StringState make_string_circle(double r0, double v0, int m) {
    if (!(r0 > 0.0)) {
        throw InvalidConfigError("string circle radius must be positive");
    }
    if (!(std::abs(v0) < 1.0)) {
        throw TimelikeViolationError("string circle radial speed must satisfy |v0| < 1");
    }
    const ThetaGrid grid(m);
    StringState s;
    s.m = m;
    s.x.resize(m);
    s.y.resize(m);
    s.vx.resize(m);
    s.vy.resize(m);
    for (int j = 0; j < m; ++j) {
        const double u = grid.node(j);
        s.x[j] = r0 * std::cos(u);
        s.y[j] = r0 * std::sin(u);
        s.vx[j] = v0 * std::cos(u);
        s.vy[j] = v0 * std::sin(u);
    }
    return s;
}

StringState make_string_ellipse(double a, double b, int m) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw InvalidConfigError("string ellipse semi-axes must be positive");
    }
    const ThetaGrid grid(m);
    StringState s;
    s.m = m;
    s.x.resize(m);
    s.y.resize(m);
    s.vx.assign(m, 0.0);
    s.vy.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
        const double u = grid.node(j);
        s.x[j] = a * std::cos(u);
        s.y[j] = b * std::sin(u);
    }
    return s;
}

} // namespace hmcf
