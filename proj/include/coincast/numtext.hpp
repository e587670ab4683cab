#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "coincast/error.hpp"

namespace coincast {

/// Shortest decimal form that parses back to exactly the same double.
/// Locale independent; used for every numeric field written to disk.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed significant-digit rendering (general format).
inline std::string format_double(double v, int precision) {
    char buf[48];
    const auto res =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error("malformed number in " + what + ": '" + std::string(text) + "'");
    }
    return v;
}

inline long parse_long(std::string_view text, const std::string& what) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error("malformed integer in " + what + ": '" + std::string(text) + "'");
    }
    return v;
}

} // namespace coincast
