#include "pqcorr/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <string>
#include <cstdio>

#include "pqcorr/errors.hpp"

namespace pqcorr {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out)
{
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

std::int64_t parse_iso8601_utc(std::string_view text)
{
    using namespace std::chrono;

    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    bool ok = text.size() == 20 && read_digits(text, 0, 4, y) && text[4] == '-' &&
              read_digits(text, 5, 2, mo) && text[7] == '-' && read_digits(text, 8, 2, d) &&
              text[10] == 'T' && read_digits(text, 11, 2, h) && text[13] == ':' &&
              read_digits(text, 14, 2, mi) && text[16] == ':' && read_digits(text, 17, 2, se) &&
              text[19] == 'Z';
    if (!ok) throw DataError("invalid timestamp '" + std::string(text) + "' (expected YYYY-MM-DDTHH:MM:SSZ)");

    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 59)
        throw DataError("invalid timestamp '" + std::string(text) + "' (out-of-range field)");

    std::int64_t days = sys_days{ymd}.time_since_epoch().count();
    return days * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds)
{
    using namespace std::chrono;

    std::int64_t days = floor_div(epoch_seconds, 86400);
    std::int64_t rem = epoch_seconds - days * 86400;
    year_month_day ymd{sys_days{std::chrono::days{days}}};

    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::string format_double(double value)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw DataError("invalid numeric value '" + std::string(text) + "'");
    return v;
}

}  // namespace pqcorr
