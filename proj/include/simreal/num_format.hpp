#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace simreal {

// Shortest decimal string that parses back to the exact same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace simreal
