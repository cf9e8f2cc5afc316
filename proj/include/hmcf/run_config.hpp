#pragma once

#include "hmcf/hmcf_solver.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace hmcf {

/// Full description of one string run, parsed from the [string] section.
struct StringRunConfig {
    enum class Shape { circle, ellipse };
    Shape shape = Shape::circle;
    double r0 = 1.0;
    double a = 1.0;
    double b = 1.0;
    double v0 = 0.0;  // radial initial speed (circle only)
    int m = 64;
    double cfl = 0.25;
    double t_end = 1.0;
    double collapse_diameter = 1e-3;
    int record_every = 4;
};

struct OutputOptions {
    std::string dir = "out";
};

/// One parsed run file: either a flow config ([initial]/[velocity]/[solver])
/// or a string config ([string]), plus output options.
struct RunSpec {
    std::variant<FlowConfig, StringRunConfig> config;
    OutputOptions output;
};

/// Parse a line-oriented `key = value` config grouped in [sections].
/// Unknown sections or keys are rejected with the offending line number;
/// defaults are applied to everything not given. Initial-data validation is
/// delegated to the constructors, so convexity violations are reported with
/// their margin.
RunSpec parse_config(const std::filesystem::path& path);

/// Same, from in-memory text; `name` labels error messages.
RunSpec parse_config_text(std::string_view text, std::string_view name);

/// Canonical serialization of a resolved spec: fixed section and key order,
/// every default filled in, numbers in 17-significant-digit scientific form.
std::string canonical_config_text(const RunSpec& spec);

/// FNV-1a (64-bit, hex) over the canonical text. Stable across platforms.
std::string config_digest(const RunSpec& spec);

std::string to_string(StringRunConfig::Shape shape);

} // namespace hmcf
