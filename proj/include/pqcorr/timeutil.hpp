#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pqcorr {

// Floor division/modulo that stay correct for negative timestamps.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b)
{
    return a - floor_div(a, b) * b;
}

// Strict ISO-8601 UTC timestamps, "YYYY-MM-DDTHH:MM:SSZ" only.
// Anything without the trailing Z (or with offsets/fractions) is rejected.
std::int64_t parse_iso8601_utc(std::string_view text);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

// Shortest decimal representation that round-trips through from_chars.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace pqcorr
