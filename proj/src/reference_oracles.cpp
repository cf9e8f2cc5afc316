#include "hmcf/reference_oracles.hpp"

#include "hmcf/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace hmcf {

namespace {

namespace ode = boost::numeric::odeint;
using RadialState = std::array<double, 2>; // (R, R')

constexpr double kLocalTol = 1e-12;

template <class System, class Remaining>
RadialSolution integrate_radial(System sys, double r0, double r1, double t_end,
                                Remaining remaining_after_halt) {
    const double r_halt = 1e-6 * r0;
    auto stepper = ode::make_dense_output(kLocalTol, kLocalTol,
                                          ode::runge_kutta_dopri5<RadialState>());
    RadialState y{r0, r1};
    stepper.initialize(y, 0.0, std::min(1e-4, 0.5 * t_end));

    RadialSolution out;
    out.times.push_back(0.0);
    out.radius.push_back(r0);
    out.speed.push_back(r1);

    while (stepper.current_time() < t_end) {
        stepper.do_step(sys);
        const double t1 = stepper.current_time();
        const RadialState& cur = stepper.current_state();
        if (!std::isfinite(cur[0]) || !std::isfinite(cur[1])) {
            throw NumericalFailureError("radial oracle produced non-finite values");
        }

        if (cur[0] <= r_halt) {
            // locate R = r_halt by bisection on the dense-output interpolant
            double lo = stepper.previous_time();
            double hi = t1;
            RadialState probe;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, probe);
                if (probe[0] <= r_halt) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            stepper.calc_state(hi, probe);
            out.times.push_back(hi);
            out.radius.push_back(probe[0]);
            out.speed.push_back(probe[1]);
            out.collapse_time = hi + remaining_after_halt(probe[0], probe[1]);
            return out;
        }

        if (t1 >= t_end) {
            RadialState probe;
            stepper.calc_state(t_end, probe);
            out.times.push_back(t_end);
            out.radius.push_back(probe[0]);
            out.speed.push_back(probe[1]);
            break;
        }
        out.times.push_back(t1);
        out.radius.push_back(cur[0]);
        out.speed.push_back(cur[1]);
    }
    return out;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

RadialSolution circle_flow(double r0, double r1, double d, double t_end) {
    if (!(r0 > 0.0)) {
        throw InvalidConfigError("circle_flow: r0 must be positive");
    }
    if (!(t_end > 0.0)) {
        throw InvalidConfigError("circle_flow: t_end must be positive");
    }
    auto sys = [d](const RadialState& y, RadialState& dydt, double /*t*/) {
        dydt[0] = y[1];
        dydt[1] = -1.0 / y[0] + d * y[1];
    };
    auto remaining = [](double r_halt, double rdot) {
        // time from r_halt to 0 along 1/2 R'^2 + ln R = const:
        //   integral_0^{r_halt} dR / sqrt(v^2 + 2 ln(r_halt/R))
        //   = r_halt e^{v^2/2} sqrt(pi/2) erfc(v/sqrt(2)),  v = |R'|
        const double v = std::abs(rdot);
        return r_halt * std::exp(0.5 * v * v) * std::sqrt(std::numbers::pi / 2.0) *
               std::erfc(v / std::numbers::sqrt2);
    };
    return integrate_radial(sys, r0, r1, t_end, remaining);
}

double collapse_time_quadrature(double r0, double r1) {
    if (!(r0 > 0.0)) {
        throw InvalidConfigError("collapse_time_quadrature: r0 must be positive");
    }
    if (r1 > 0.0) {
        throw NotApplicableError("collapse_time_quadrature: requires r1 <= 0 (no closed energy "
                                 "form for expanding circles; use circle_flow)");
    }
    // After u = sqrt(r1^2 + 2 ln(r0/R)) the integral becomes
    //   T = r0 e^{v^2/2} integral_v^inf e^{-u^2/2} du,  v = |r1|,
    // with a smooth integrand; the tail beyond v+9 is below 2.6e-18.
    const double v = std::abs(r1);
    const double tail = integrate_adaptive([](double u) { return std::exp(-0.5 * u * u); }, v,
                                           v + 9.0, 1e-14);
    return r0 * std::exp(0.5 * v * v) * tail;
}

RadialSolution string_circle(double r0, double r1, double t_end) {
    if (!(r0 > 0.0)) {
        throw InvalidConfigError("string_circle: r0 must be positive");
    }
    if (!(t_end > 0.0)) {
        throw InvalidConfigError("string_circle: t_end must be positive");
    }
    if (!(std::abs(r1) < 1.0)) {
        throw TimelikeViolationError("string_circle: |r1| must be < 1 (time-like condition), "
                                     "got " + std::to_string(r1));
    }
    auto sys = [](const RadialState& y, RadialState& dydt, double /*t*/) {
        dydt[0] = y[1];
        dydt[1] = (y[1] * y[1] - 1.0) / y[0];
    };
    auto remaining = [](double r_halt, double rdot) {
        // (1 - R'^2)/R^2 = c^2 is conserved; time from r_halt to 0 is
        // asin(c r_halt)/c.
        const double one_minus = std::max(0.0, 1.0 - rdot * rdot);
        const double c = std::sqrt(one_minus) / r_halt;
        if (c * r_halt < 1e-12) return r_halt;
        return std::asin(std::min(1.0, c * r_halt)) / c;
    };
    return integrate_radial(sys, r0, r1, t_end, remaining);
}

} // namespace hmcf
