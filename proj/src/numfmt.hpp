#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace docrebench::detail {

/// Shortest round-trip decimal form; integral values print as integers.
inline std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.007199254740992e15)
        return std::to_string(static_cast<long long>(v));
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace docrebench::detail
