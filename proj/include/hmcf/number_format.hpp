#pragma once

#include <string>

namespace hmcf {

/// Scientific notation with 17 significant digits, locale-independent
/// (std::to_chars). Round-trips any double exactly.
std::string format_sig17(double v);

/// General notation with the given significant digits (for plot output).
std::string format_general(double v, int digits);

/// Locale-independent parse of a double; throws InvalidConfigError on garbage.
double parse_double(const std::string& text);

} // namespace hmcf
