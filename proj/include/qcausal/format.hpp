#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace qcausal {

// shortest decimal string that round-trips the exact double
inline std::string format_double(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

}  // namespace qcausal
