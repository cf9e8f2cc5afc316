#include "hmcf/runner.hpp"

#include "hmcf/number_format.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace hmcf {

namespace {

using json = nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        throw Error("cannot write file: " + path.string());
    }
    out << text;
    if (!out.good()) {
        throw Error("write failed: " + path.string());
    }
}

std::string zero_pad(std::size_t value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

void append_optional(std::string& row, const std::optional<double>& v) {
    row += ',';
    if (v) row += format_sig17(*v);
}

std::string flow_diagnostics_csv(const Trajectory& traj) {
    std::string out = "t,L,A,k_min,k_max,grad_bound,conv_margin,width,isoper,"
                      "dL_dt_residual,d2L_dt2_residual,dA_dt_residual,d2A_dt2_residual,"
                      "d3A_dt3_residual,curvature_pde_residual\n";
    for (const DiagnosticsRecord& r : traj.records) {
        std::string row = format_sig17(r.t);
        for (double v : {r.L, r.A, r.k_min, r.k_max, r.grad_bound, r.conv_margin, r.width,
                         r.isoper}) {
            row += ',';
            row += format_sig17(v);
        }
        append_optional(row, r.dL_dt_residual);
        append_optional(row, r.d2L_dt2_residual);
        append_optional(row, r.dA_dt_residual);
        append_optional(row, r.d2A_dt2_residual);
        append_optional(row, r.d3A_dt3_residual);
        append_optional(row, r.curvature_pde_residual);
        row += '\n';
        out += row;
    }
    return out;
}

std::string string_diagnostics_csv(const StringTrajectory& traj) {
    std::string out = "t,diameter,gauge_residual,timelike_margin,min_stretch\n";
    for (const StringRecord& r : traj.records) {
        std::string row = format_sig17(r.t);
        for (double v : {r.diameter, r.gauge_residual, r.timelike_margin, r.min_stretch}) {
            row += ',';
            row += format_sig17(v);
        }
        row += '\n';
        out += row;
    }
    return out;
}

std::string flow_snapshot_csv(const SupportState& state) {
    const CurveSample curve = reconstruct(to_profile(state));
    std::string out = "theta,S,S_tau,x,y,k\n";
    for (int j = 0; j < state.grid.size(); ++j) {
        out += format_sig17(state.grid.node(j));
        for (double v : {state.s[j], state.p[j], curve.x[j], curve.y[j], curve.k[j]}) {
            out += ',';
            out += format_sig17(v);
        }
        out += '\n';
    }
    return out;
}

std::string string_snapshot_csv(const StringState& state) {
    const ThetaGrid grid(state.m);
    std::string out = "u,x,y,vx,vy\n";
    for (int j = 0; j < state.m; ++j) {
        out += format_sig17(grid.node(j));
        for (double v : {state.x[j], state.y[j], state.vx[j], state.vy[j]}) {
            out += ',';
            out += format_sig17(v);
        }
        out += '\n';
    }
    return out;
}

struct Polyline {
    std::vector<double> x, y;
};

std::string curves_svg(const std::vector<Polyline>& curves) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const Polyline& c : curves) {
        for (std::size_t j = 0; j < c.x.size(); ++j) {
            xmin = std::min(xmin, c.x[j]);
            xmax = std::max(xmax, c.x[j]);
            ymin = std::min(ymin, -c.y[j]);  // svg y grows downward
            ymax = std::max(ymax, -c.y[j]);
        }
    }
    if (!(xmax > xmin)) {
        xmin = -1.0;
        xmax = 1.0;
        ymin = -1.0;
        ymax = 1.0;
    }
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
    const double w = xmax - xmin + 2 * pad;
    const double h = ymax - ymin + 2 * pad;
    auto g = [](double v) { return format_general(v, 8); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + g(xmin - pad) +
                      " " + g(ymin - pad) + " " + g(w) + " " + g(h) + "\">\n";
    out += "<g fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"" + g(0.004 * std::max(w, h)) +
           "\">\n";
    const std::size_t count = curves.size();
    for (std::size_t i = 0; i < count; ++i) {
        const Polyline& c = curves[i];
        const double opacity = count > 1 ? 0.15 + 0.85 * static_cast<double>(i) / (count - 1)
                                         : 1.0;
        out += "<polyline opacity=\"" + g(opacity) + "\" points=\"";
        for (std::size_t j = 0; j < c.x.size(); ++j) {
            out += g(c.x[j]) + "," + g(-c.y[j]) + " ";
        }
        if (!c.x.empty()) out += g(c.x[0]) + "," + g(-c.y[0]);
        out += "\"/>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

json summary_json(const RunSummary& summary) {
    json j;
    j["config_digest"] = summary.config_digest;
    j["termination"] = summary.termination;
    j["t_final"] = summary.t_final;
    if (summary.collapse_estimate) {
        j["collapse_estimate"] = {{"value", summary.collapse_estimate->value},
                                  {"uncertainty", summary.collapse_estimate->uncertainty}};
    } else {
        j["collapse_estimate"] = nullptr;
    }
    j["max_identity_residuals"] = json::object();
    for (const auto& [key, value] : summary.max_identity_residuals) {
        j["max_identity_residuals"][key] = value;
    }
    j["wall_time_seconds"] = summary.wall_time_seconds;
    return j;
}

std::map<std::string, double> residual_maxima(const Trajectory& traj) {
    std::map<std::string, double> out{{"dL_dt", 0.0},          {"d2L_dt2", 0.0},
                                      {"dA_dt", 0.0},          {"d2A_dt2", 0.0},
                                      {"d3A_dt3", 0.0},        {"curvature_pde", 0.0}};
    auto fold = [&out](const char* key, const std::optional<double>& v) {
        if (v) out[key] = std::max(out[key], *v);
    };
    for (const DiagnosticsRecord& r : traj.records) {
        fold("dL_dt", r.dL_dt_residual);
        fold("d2L_dt2", r.d2L_dt2_residual);
        fold("dA_dt", r.dA_dt_residual);
        fold("d2A_dt2", r.d2A_dt2_residual);
        fold("d3A_dt3", r.d3A_dt3_residual);
        fold("curvature_pde", r.curvature_pde_residual);
    }
    return out;
}

RunSummary run_flow(const FlowConfig& config, const RunSpec& spec,
                    const std::filesystem::path& dir, bool svg) {
    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = evolve(config);
    try {
        traj = finalize_residuals(std::move(traj));
    } catch (const TooFewRecordsError&) {
        // short runs keep their residual fields empty
    }

    RunSummary summary;
    summary.config_digest = config_digest(spec);
    summary.termination = std::string(to_string(traj.termination));
    summary.t_final = traj.t_final;
    summary.max_identity_residuals = residual_maxima(traj);
    if (traj.termination == Termination::collapse_detected && traj.records.size() >= 4) {
        summary.collapse_estimate = estimate_collapse_time(traj);
    }

    write_text_file(dir / "diagnostics.csv", flow_diagnostics_csv(traj));
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        write_text_file(dir / ("snapshot_" + zero_pad(i, 4) + ".csv"),
                        flow_snapshot_csv(traj.snapshots[i]));
    }
    if (svg) {
        std::vector<Polyline> curves;
        curves.reserve(traj.snapshots.size());
        for (const SupportState& s : traj.snapshots) {
            const CurveSample c = reconstruct(to_profile(s));
            curves.push_back({c.x, c.y});
        }
        write_text_file(dir / "curves.svg", curves_svg(curves));
    }

    summary.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(dir / "summary.json", summary_json(summary).dump(2) + "\n");
    return summary;
}

RunSummary run_string(const StringRunConfig& config, const RunSpec& spec,
                      const std::filesystem::path& dir, bool svg) {
    const auto t0 = std::chrono::steady_clock::now();
    const StringState initial =
        config.shape == StringRunConfig::Shape::circle
            ? make_string_circle(config.r0, config.v0, config.m)
            : make_string_ellipse(config.a, config.b, config.m);
    const StringTrajectory traj = string_evolve(initial, config.cfl, config.t_end,
                                                config.record_every, config.collapse_diameter);

    RunSummary summary;
    summary.config_digest = config_digest(spec);
    summary.termination = std::string(to_string(traj.termination));
    summary.t_final = traj.t_final;
    double gauge = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (const StringRecord& r : traj.records) {
        gauge = std::max(gauge, r.gauge_residual);
        margin = std::min(margin, r.timelike_margin);
    }
    summary.max_identity_residuals = {{"gauge_residual_max", gauge},
                                      {"timelike_margin_min", margin}};

    write_text_file(dir / "diagnostics.csv", string_diagnostics_csv(traj));
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        write_text_file(dir / ("snapshot_" + zero_pad(i, 4) + ".csv"),
                        string_snapshot_csv(traj.snapshots[i]));
    }
    if (svg) {
        std::vector<Polyline> curves;
        curves.reserve(traj.snapshots.size());
        for (const StringState& s : traj.snapshots) curves.push_back({s.x, s.y});
        write_text_file(dir / "curves.svg", curves_svg(curves));
    }

    summary.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(dir / "summary.json", summary_json(summary).dump(2) + "\n");
    return summary;
}

} // namespace

RunSummary run_to_directory(const RunSpec& spec, const RunOptions& options) {
    const std::filesystem::path dir =
        options.out_dir.empty() ? std::filesystem::path(spec.output.dir) : options.out_dir;
    std::filesystem::create_directories(dir);
    if (const FlowConfig* cfg = std::get_if<FlowConfig>(&spec.config)) {
        return run_flow(*cfg, spec, dir, options.svg);
    }
    return run_string(std::get<StringRunConfig>(spec.config), spec, dir, options.svg);
}

int exit_code_for(const RunSummary& summary) {
    if (summary.termination == "hyperbolicity_lost") return 3;
    if (summary.termination == "numerical_failure") return 4;
    return 0;
}

RefineResult refine(const FlowConfig& base, int levels) {
    if (levels < 3) {
        throw InvalidConfigError("refine: levels must be >= 3, got " + std::to_string(levels));
    }
    std::vector<FlowConfig> cfgs;
    std::vector<Trajectory> trajs;
    for (int l = 0; l < levels; ++l) {
        FlowConfig cfg = base;
        cfg.n = base.n << l;
        validate(cfg);
        cfgs.push_back(cfg);
        trajs.push_back(evolve(cfg));
    }

    RefineResult result;
    result.levels.resize(levels);
    for (int l = 0; l < levels; ++l) {
        result.levels[l].n = cfgs[l].n;
        result.levels[l].termination = std::string(to_string(trajs[l].termination));
        result.levels[l].t_final = trajs[l].t_final;
        if (trajs[l].termination == Termination::collapse_detected &&
            trajs[l].records.size() >= 4) {
            result.levels[l].collapse_estimate = estimate_collapse_time(trajs[l]).value;
        }
    }

    const bool is_circle = base.initial.kind == InitialShape::Kind::circle &&
                           base.velocity.kind == InitialVelocity::Kind::constant;
    const bool all_t_end = std::all_of(trajs.begin(), trajs.end(), [](const Trajectory& t) {
        return t.termination == Termination::reached_t_end;
    });
    const bool all_collapse = std::all_of(trajs.begin(), trajs.end(), [](const Trajectory& t) {
        return t.termination == Termination::collapse_detected;
    });

    if (is_circle && all_t_end) {
        result.error_metric = "oracle_state";
        const RadialSolution oracle =
            circle_flow(base.initial.r0, -base.velocity.f0, base.d, base.t_end);
        const double r_end = oracle.radius.back();
        for (int l = 0; l < levels; ++l) {
            const SupportState& s = trajs[l].snapshots.back();
            double err = 0.0;
            for (double v : s.s) err = std::max(err, std::abs(v - r_end));
            result.levels[l].error = err;
        }
    } else if (is_circle && all_collapse) {
        result.error_metric = "oracle_collapse";
        const RadialSolution oracle =
            circle_flow(base.initial.r0, -base.velocity.f0, base.d, base.t_end);
        if (!oracle.collapse_time) {
            throw NotApplicableError("refine: PDE collapsed but the radial oracle did not "
                                     "within t_end");
        }
        for (int l = 0; l < levels; ++l) {
            result.levels[l].error =
                std::abs(*result.levels[l].collapse_estimate - *oracle.collapse_time);
        }
    } else {
        // self-convergence against the finest level at the common nodes
        result.error_metric = "self_state";
        if (!all_t_end && !all_collapse) {
            throw NotApplicableError("refine: levels terminated differently (" +
                                     result.levels[0].termination + " vs " +
                                     result.levels[levels - 1].termination +
                                     "); no common comparison point");
        }
        if (all_t_end) {
            const SupportState& fine = trajs[levels - 1].snapshots.back();
            for (int l = 0; l + 1 < levels; ++l) {
                const SupportState& s = trajs[l].snapshots.back();
                const int stride = 1 << (levels - 1 - l);
                double err = 0.0;
                for (int j = 0; j < s.grid.size(); ++j) {
                    err = std::max(err, std::abs(s.s[j] - fine.s[j * stride]));
                }
                result.levels[l].error = err;
            }
        } else {
            for (int l = 0; l + 1 < levels; ++l) {
                result.levels[l].error = std::abs(*result.levels[l].collapse_estimate -
                                                  *result.levels[levels - 1].collapse_estimate);
            }
        }
        result.levels[levels - 1].error = 0.0;
    }

    const int order_count = result.error_metric == "self_state" ? levels - 1 : levels;
    for (int l = 1; l < order_count; ++l) {
        const double prev = result.levels[l - 1].error;
        const double cur = result.levels[l].error;
        if (prev > 0.0 && cur > 0.0) {
            result.levels[l].observed_order = std::log2(prev / cur);
        }
    }

    // Richardson extrapolation of the collapse estimates over the last three levels
    if (all_collapse && levels >= 3) {
        const double t0 = *result.levels[levels - 3].collapse_estimate;
        const double t1 = *result.levels[levels - 2].collapse_estimate;
        const double t2 = *result.levels[levels - 1].collapse_estimate;
        const double e01 = std::abs(t1 - t0);
        const double e12 = std::abs(t2 - t1);
        if (e12 < 1e-12 || e01 <= e12) {
            result.richardson = t2;
        } else {
            const double p = std::clamp(std::log2(e01 / e12), 0.5, 8.0);
            result.richardson = t2 + (t2 - t1) / (std::pow(2.0, p) - 1.0);
        }
    }
    return result;
}

void write_refine_csv(const RefineResult& result, const std::filesystem::path& path) {
    std::string out = "n,termination,t_final,error,observed_order,collapse_estimate\n";
    for (const RefineLevel& level : result.levels) {
        out += std::to_string(level.n) + "," + level.termination + "," +
               format_sig17(level.t_final) + "," + format_sig17(level.error) + "," +
               format_sig17(level.observed_order) + ",";
        if (level.collapse_estimate) out += format_sig17(*level.collapse_estimate);
        out += '\n';
    }
    write_text_file(path, out);
}

CompareReport compare(const FlowConfig& outer, const FlowConfig& inner) {
    validate(outer);
    validate(inner);
    if (outer.n != inner.n) {
        throw InvalidConfigError("compare: both runs must use the same grid n");
    }
    SupportState so = initial_state(outer);
    SupportState si = initial_state(inner);
    if (!containment(so, si)) {
        throw InvalidConfigError("compare: the inner curve is not initially contained in the "
                                 "outer one");
    }
    {
        const ThetaGrid grid(outer.n);
        const InitialData vo = make_initial(outer.initial, outer.velocity, grid);
        const InitialData vi = make_initial(inner.initial, inner.velocity, grid);
        for (int j = 0; j < grid.size(); ++j) {
            if (vi.velocity.f[j] < vo.velocity.f[j] - 1e-15) {
                throw InvalidConfigError("compare: needs f_inner >= f_outer pointwise; "
                                         "violated at theta = " + std::to_string(grid.node(j)));
            }
        }
    }

    CompareReport report;
    auto classify = [](const FlowConfig& cfg, const SupportState& s,
                       std::optional<Termination>& term) {
        const DiagnosticsRecord probe = record(s, cfg.d);
        const bool tiny = probe.width <= cfg.width_min;
        const bool kboom = probe.k_max >= cfg.k_max_limit;
        if (tiny || (kboom && probe.width <= 10.0 * cfg.width_min)) {
            term = Termination::collapse_detected;
        } else if (kboom) {
            term = Termination::blowup_detected;
        }
    };

    auto check_containment = [&](double t) {
        ++report.records;
        double worst = 0.0;
        for (int j = 0; j < so.grid.size(); ++j) {
            worst = std::max(worst, si.s[j] - so.s[j]);
        }
        if (worst > 1e-10) {
            ++report.violations;
            report.max_violation = std::max(report.max_violation, worst);
            if (!report.first_violation_t) report.first_violation_t = t;
        }
    };

    check_containment(0.0);
    std::optional<Termination> term_outer;
    std::optional<Termination> term_inner;
    long steps = 0;
    const double t_eps = 1e-13 * std::max(1.0, std::max(outer.t_end, inner.t_end));

    while (!term_inner && !term_outer) {
        const double t = so.t;
        if (inner.t_end - t <= t_eps) {
            term_inner = Termination::reached_t_end;
            break;
        }
        if (outer.t_end - t <= t_eps) {
            term_outer = Termination::reached_t_end;
            break;
        }
        double dt_outer, dt_inner;
        try {
            dt_outer = cfl_dt(so, outer.cfl);
        } catch (const Error&) {
            term_outer = Termination::hyperbolicity_lost;
            break;
        }
        try {
            dt_inner = cfl_dt(si, inner.cfl);
        } catch (const Error&) {
            term_inner = Termination::hyperbolicity_lost;
            break;
        }
        const double dt = std::min({dt_outer, dt_inner, outer.t_end - t, inner.t_end - t});
        try {
            so = step(so, dt, outer.d);
        } catch (const HyperbolicityLostError&) {
            term_outer = Termination::hyperbolicity_lost;
            break;
        } catch (const NumericalFailureError&) {
            term_outer = Termination::numerical_failure;
            break;
        }
        try {
            si = step(si, dt, inner.d);
        } catch (const HyperbolicityLostError&) {
            term_inner = Termination::hyperbolicity_lost;
            break;
        } catch (const NumericalFailureError&) {
            term_inner = Termination::numerical_failure;
            break;
        }
        ++steps;
        if (steps % outer.record_every == 0) check_containment(so.t);
        classify(inner, si, term_inner);
        classify(outer, so, term_outer);
        if (term_inner || term_outer) check_containment(so.t);
    }

    report.t_final_inner = si.t;
    const bool inner_terminated = term_inner.has_value();
    report.termination_inner =
        inner_terminated ? std::string(to_string(*term_inner)) : std::string("still_running");

    // let the outer run finish on its own
    if (!term_outer) {
        while (true) {
            if (outer.t_end - so.t <= t_eps) {
                term_outer = Termination::reached_t_end;
                break;
            }
            double dt;
            try {
                dt = cfl_dt(so, outer.cfl);
            } catch (const Error&) {
                term_outer = Termination::hyperbolicity_lost;
                break;
            }
            dt = std::min(dt, outer.t_end - so.t);
            try {
                so = step(so, dt, outer.d);
            } catch (const HyperbolicityLostError&) {
                term_outer = Termination::hyperbolicity_lost;
                break;
            } catch (const NumericalFailureError&) {
                term_outer = Termination::numerical_failure;
                break;
            }
            classify(outer, so, term_outer);
            if (term_outer) break;
        }
    }
    report.t_final_outer = so.t;
    report.termination_outer = std::string(to_string(*term_outer));
    report.inner_terminated_no_later =
        inner_terminated && report.t_final_inner <= report.t_final_outer + 1e-12;
    return report;
}

void write_radial_csv(const RadialSolution& sol, const std::filesystem::path& path) {
    std::string out = "t,R,Rdot\n";
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        out += format_sig17(sol.times[i]) + "," + format_sig17(sol.radius[i]) + "," +
               format_sig17(sol.speed[i]) + "\n";
    }
    write_text_file(path, out);
}

std::vector<SweepEntry> run_sweep(const std::filesystem::path& list_file,
                                  const std::filesystem::path& out_root, std::size_t workers) {
    std::ifstream in(list_file);
    if (!in.is_open()) {
        throw InvalidConfigError("cannot open sweep list: " + list_file.string());
    }
    const std::filesystem::path base = list_file.parent_path();

    std::vector<SweepEntry> entries;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string t;
        {
            std::istringstream ss(line);
            ss >> t;
        }
        if (t.empty()) continue;
        SweepEntry entry;
        entry.config_path = std::filesystem::path(t).is_absolute() ? t : base / t;
        try {
            const RunSpec spec = parse_config(entry.config_path);
            entry.digest = config_digest(spec);
            entry.status = seen.insert(entry.digest).second ? "pending" : "duplicate";
        } catch (const Error& e) {
            entry.status = std::string("config error: ") + e.what();
        }
        entries.push_back(std::move(entry));
    }

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].status == "pending") todo.push_back(i);
    }
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= todo.size()) return;
            SweepEntry& entry = entries[todo[slot]];
            try {
                const RunSpec spec = parse_config(entry.config_path);
                RunOptions options;
                options.out_dir = out_root / entry.digest;
                const RunSummary summary = run_to_directory(spec, options);
                std::lock_guard<std::mutex> lock(mutex);
                entry.summary = summary;
                entry.status = "ok";
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(mutex);
                entry.status = std::string("run error: ") + e.what();
            }
        }
    };
    const std::size_t count = std::max<std::size_t>(
        1, std::min(workers, std::max<std::size_t>(1, todo.size())));
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    return entries;
}

void write_sweep_summary(const std::vector<SweepEntry>& entries,
                         const std::filesystem::path& path) {
    json root = json::array();
    for (const SweepEntry& e : entries) {
        json j;
        j["config"] = e.config_path.string();
        j["digest"] = e.digest;
        j["status"] = e.status;
        if (e.status == "ok") j["summary"] = summary_json(e.summary);
        root.push_back(std::move(j));
    }
    write_text_file(path, root.dump(2) + "\n");
}

} // namespace hmcf
