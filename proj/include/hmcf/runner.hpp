#pragma once

#include "hmcf/reference_oracles.hpp"
#include "hmcf/run_config.hpp"
#include "hmcf/string_solver.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hmcf {

/// Machine-readable result of one run.
struct RunSummary {
    std::string config_digest;
    std::string termination;
    double t_final = 0.0;
    std::optional<CollapseEstimate> collapse_estimate;
    std::map<std::string, double> max_identity_residuals;
    double wall_time_seconds = 0.0;
};

struct RunOptions {
    std::filesystem::path out_dir;  // overrides the config's output.dir when set
    bool svg = false;
};

/// Execute a flow or string run, finalize residuals, and write
/// diagnostics.csv, snapshot_XXXX.csv files, summary.json and (optionally)
/// curves.svg into the output directory. diagnostics.csv and the snapshots
/// are byte-identical across repeated runs of the same config.
RunSummary run_to_directory(const RunSpec& spec, const RunOptions& options = {});

/// Exit code policy: 0 for physics terminations, 3 for hyperbolicity loss,
/// 4 for numerical failure. (Config errors exit 2 before a summary exists.)
int exit_code_for(const RunSummary& summary);

struct RefineLevel {
    int n = 0;
    std::string termination;
    double t_final = 0.0;
    double error = 0.0;           // vs oracle (circle) or vs finest level
    double observed_order = 0.0;  // log2 of consecutive error ratio; 0 for the first level
    std::optional<double> collapse_estimate;
};

struct RefineResult {
    std::vector<RefineLevel> levels;
    std::string error_metric;  // "oracle_state", "oracle_collapse" or "self_state"
    std::optional<double> richardson;  // extrapolated collapse time, when applicable
};

/// Convergence study: rerun with n doubled per level (the recording cadence in
/// time doubles with it, since dt is CFL-tied to the grid). Circle runs are
/// measured against the radial oracle; everything else self-converges against
/// the finest level at the common nodes. levels >= 3.
RefineResult refine(const FlowConfig& base, int levels);

void write_refine_csv(const RefineResult& result, const std::filesystem::path& path);

struct CompareReport {
    std::size_t records = 0;
    std::size_t violations = 0;
    double max_violation = 0.0;
    std::optional<double> first_violation_t;
    std::string termination_outer;
    std::string termination_inner;
    double t_final_outer = 0.0;
    double t_final_inner = 0.0;
    bool inner_terminated_no_later = false;
};

/// Containment experiment: both curves advance in lockstep with the shared
/// time step min(cfl_dt(outer), cfl_dt(inner)), so record times coincide
/// exactly. Requires the same grid, initial containment, and
/// f_inner >= f_outer pointwise. After the inner run terminates the outer one
/// continues alone to its own termination.
CompareReport compare(const FlowConfig& outer, const FlowConfig& inner);

/// Dump a radial oracle solution as CSV (t, R, Rdot) plus a summary line.
void write_radial_csv(const RadialSolution& sol, const std::filesystem::path& path);

struct SweepEntry {
    std::filesystem::path config_path;
    std::string digest;
    std::string status;  // "ok", "duplicate", or an error message
    RunSummary summary;
};

/// Run every config listed in the sweep file (one path per line, relative to
/// the list file; # comments) concurrently, up to `workers` threads. Outputs
/// land in out_root/<digest>/. Duplicate digests are executed once.
std::vector<SweepEntry> run_sweep(const std::filesystem::path& list_file,
                                  const std::filesystem::path& out_root, std::size_t workers);

void write_sweep_summary(const std::vector<SweepEntry>& entries,
                         const std::filesystem::path& path);

} // namespace hmcf
