#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <system_error>

namespace repnet {

// Locale-independent decimal formatting with 6 significant digits; the
// one number format used in emitted CSV.
inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

// Absent values serialize as the empty field.
inline std::string format_number(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string{};
}

}  // namespace repnet
