#include "hmcf/number_format.hpp"

#include "hmcf/errors.hpp"

#include <charconv>
#include <system_error>

namespace hmcf {

std::string format_sig17(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

std::string format_general(double v, int digits) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw InvalidConfigError("not a number: '" + text + "'");
    }
    return value;
}

} // namespace hmcf
