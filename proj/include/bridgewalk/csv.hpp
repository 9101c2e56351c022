// csv.hpp — deterministic numeric rendering for CSV emission.
//
// Two dialects are used by the CLI: kernel tables carry 17 significant
// digits; everything else uses the shortest decimal that round-trips.
// Integers are rendered bare. Rendering never depends on locale.
#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace bridgewalk {

inline std::string csv_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_double17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string csv_int(int64_t v) { return std::to_string(v); }
inline std::string csv_uint(uint64_t v) { return std::to_string(v); }

}  // namespace bridgewalk
