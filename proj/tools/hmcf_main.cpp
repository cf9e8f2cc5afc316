#include "hmcf/number_format.hpp"
#include "hmcf/reference_oracles.hpp"
#include "hmcf/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitHyperbolicityLost = 3;
constexpr int kExitNumericalFailure = 4;

void print_summary(const hmcf::RunSummary& summary) {
    std::cout << "digest       " << summary.config_digest << "\n"
              << "termination  " << summary.termination << "\n"
              << "t_final      " << hmcf::format_general(summary.t_final, 10) << "\n";
    if (summary.collapse_estimate) {
        std::cout << "collapse     " << hmcf::format_general(summary.collapse_estimate->value, 10)
                  << " +- " << hmcf::format_general(summary.collapse_estimate->uncertainty, 3)
                  << "\n";
    }
    for (const auto& [key, value] : summary.max_identity_residuals) {
        std::cout << "residual " << key << " = " << hmcf::format_general(value, 4) << "\n";
    }
    std::cout << "wall_time    " << hmcf::format_general(summary.wall_time_seconds, 4) << " s\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool svg) {
    const hmcf::RunSpec spec = hmcf::parse_config(config_path);
    hmcf::RunOptions options;
    options.out_dir = out_dir;
    options.svg = svg;
    const hmcf::RunSummary summary = hmcf::run_to_directory(spec, options);
    print_summary(summary);
    return hmcf::exit_code_for(summary);
}

int cmd_refine(const std::string& config_path, int levels, const std::string& out_dir) {
    const hmcf::RunSpec spec = hmcf::parse_config(config_path);
    const auto* cfg = std::get_if<hmcf::FlowConfig>(&spec.config);
    if (cfg == nullptr) {
        throw hmcf::InvalidConfigError("refine works on flow configs only");
    }
    const hmcf::RefineResult result = hmcf::refine(*cfg, levels);
    std::cout << "metric: " << result.error_metric << "\n";
    std::cout << "n,termination,t_final,error,observed_order\n";
    for (const hmcf::RefineLevel& level : result.levels) {
        std::cout << level.n << "," << level.termination << ","
                  << hmcf::format_general(level.t_final, 10) << ","
                  << hmcf::format_general(level.error, 6) << ","
                  << hmcf::format_general(level.observed_order, 4) << "\n";
    }
    if (result.richardson) {
        std::cout << "richardson collapse time: " << hmcf::format_sig17(*result.richardson)
                  << "\n";
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        hmcf::write_refine_csv(result, std::filesystem::path(out_dir) / "refine.csv");
    }
    return 0;
}

int cmd_compare(const std::string& outer_path, const std::string& inner_path) {
    const hmcf::RunSpec outer = hmcf::parse_config(outer_path);
    const hmcf::RunSpec inner = hmcf::parse_config(inner_path);
    const auto* outer_cfg = std::get_if<hmcf::FlowConfig>(&outer.config);
    const auto* inner_cfg = std::get_if<hmcf::FlowConfig>(&inner.config);
    if (outer_cfg == nullptr || inner_cfg == nullptr) {
        throw hmcf::InvalidConfigError("compare works on flow configs only");
    }
    const hmcf::CompareReport report = hmcf::compare(*outer_cfg, *inner_cfg);
    std::cout << "records checked     " << report.records << "\n"
              << "violations          " << report.violations << "\n";
    if (report.first_violation_t) {
        std::cout << "first violation t   " << hmcf::format_general(*report.first_violation_t, 10)
                  << "\nmax violation       " << hmcf::format_general(report.max_violation, 6)
                  << "\n";
    }
    std::cout << "inner termination   " << report.termination_inner << " at t = "
              << hmcf::format_general(report.t_final_inner, 10) << "\n"
              << "outer termination   " << report.termination_outer << " at t = "
              << hmcf::format_general(report.t_final_outer, 10) << "\n"
              << "inner no later      " << (report.inner_terminated_no_later ? "yes" : "no")
              << "\n";
    return 0;
}

int cmd_oracle(const std::string& kind, double r0, double r1, double d, double t_end,
               const std::string& out_file) {
    hmcf::RadialSolution sol;
    if (kind == "flow") {
        sol = hmcf::circle_flow(r0, r1, d, t_end);
    } else if (kind == "string") {
        sol = hmcf::string_circle(r0, r1, t_end);
    } else {
        throw hmcf::InvalidConfigError("oracle kind must be 'flow' or 'string'");
    }
    if (!out_file.empty()) hmcf::write_radial_csv(sol, out_file);
    std::cout << "samples " << sol.times.size() << "\n";
    std::cout << "R(" << hmcf::format_general(sol.times.back(), 10) << ") = "
              << hmcf::format_sig17(sol.radius.back()) << "\n";
    if (sol.collapse_time) {
        std::cout << "collapse_time = " << hmcf::format_sig17(*sol.collapse_time) << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& list_path, const std::string& out_dir, std::size_t workers) {
    const std::filesystem::path out_root = out_dir.empty() ? "sweep_out" : out_dir;
    std::filesystem::create_directories(out_root);
    const std::vector<hmcf::SweepEntry> entries =
        hmcf::run_sweep(list_path, out_root, workers);
    hmcf::write_sweep_summary(entries, out_root / "sweep_summary.json");
    bool all_ok = true;
    for (const hmcf::SweepEntry& e : entries) {
        std::cout << e.config_path.string() << " [" << e.digest << "] " << e.status << "\n";
        if (e.status != "ok" && e.status != "duplicate") all_ok = false;
    }
    return all_ok ? 0 : kExitConfigError;
}

std::size_t default_workers() {
    if (const char* env = std::getenv("HMCF_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic normal curvature flow laboratory for convex plane curves"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_file;
    std::string outer_path, inner_path;
    std::string kind = "flow";
    bool svg = false;
    int levels = 3;
    double r0 = 1.0, r1 = 0.0, d = 0.0, t_end = 2.0;
    std::size_t workers = default_workers();

    CLI::App* run = app.add_subcommand("run", "execute one configured run");
    run->add_option("config", config_path, "run configuration file")->required();
    run->add_option("--out", out_dir, "output directory (overrides output.dir)");
    run->add_flag("--svg", svg, "also render the stored snapshots as curves.svg");

    CLI::App* refine = app.add_subcommand("refine", "convergence study with n doubled per level");
    refine->add_option("config", config_path, "run configuration file")->required();
    refine->add_option("--levels", levels, "number of refinement levels (>= 3)");
    refine->add_option("--out", out_dir, "directory for refine.csv");

    CLI::App* compare = app.add_subcommand("compare", "containment experiment for two runs");
    compare->add_option("outer", outer_path, "outer run configuration")->required();
    compare->add_option("inner", inner_path, "inner run configuration")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "dump a radial reference solution");
    oracle->add_option("--kind", kind, "flow or string");
    oracle->add_option("--r0", r0, "initial radius");
    oracle->add_option("--r1", r1, "initial radial speed");
    oracle->add_option("--d", d, "dissipation constant (flow only)");
    oracle->add_option("--t-end", t_end, "integration horizon");
    oracle->add_option("--out", out_file, "CSV output path");

    CLI::App* sweep = app.add_subcommand("sweep", "run a list of configs concurrently");
    sweep->add_option("list", config_path, "file with one config path per line")->required();
    sweep->add_option("--out", out_dir, "output root directory");
    sweep->add_option("--workers", workers, "worker cap (default HMCF_WORKERS or cores)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config_path, out_dir, svg);
        if (refine->parsed()) return cmd_refine(config_path, levels, out_dir);
        if (compare->parsed()) return cmd_compare(outer_path, inner_path);
        if (oracle->parsed()) return cmd_oracle(kind, r0, r1, d, t_end, out_file);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, workers);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    } catch (const hmcf::InvalidConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const hmcf::HyperbolicityLostError& e) {
        std::cerr << "hyperbolicity lost: " << e.what() << "\n";
        return kExitHyperbolicityLost;
    } catch (const hmcf::NumericalFailureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const hmcf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return 0;
}
