#include "pqcorr/config.hpp"

#include <fstream>

#include "pqcorr/errors.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& why)
{
    throw UsageError(path + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

void validate_config(const Config& config)
{
    if (!(config.tau > 0.0) || config.tau > 1.0) throw UsageError("tau must lie in (0, 1]");
    if (config.min_pairs < 3) throw UsageError("min_pairs must be at least 3");
    if (!(config.clamp_eps > 0.0) || config.clamp_eps > 1e-3)
        throw UsageError("clamp_eps must lie in (0, 1e-3]");
    if (config.day_offset_seconds < 0 || config.day_offset_seconds >= 86400)
        throw UsageError("day_offset_seconds must lie in [0, 86400)");
    if (config.mds_dims < 1) throw UsageError("mds_dims must be positive");
    if (config.out_dir.empty()) throw UsageError("out_dir must not be empty");
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path + "'");

    Config config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        std::size_t eq = text.find('=');
        if (eq == std::string::npos) fail(path, lineno, "expected 'key = value'");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty()) fail(path, lineno, "expected 'key = value'");

        try {
            if (key == "tau")
                config.tau = parse_double(value);
            else if (key == "sense")
                config.sense = sense_from_string(value);
            else if (key == "min_pairs")
                config.min_pairs = static_cast<int>(parse_double(value));
            else if (key == "clamp_eps")
                config.clamp_eps = parse_double(value);
            else if (key == "day_offset_seconds")
                config.day_offset_seconds = static_cast<std::int64_t>(parse_double(value));
            else if (key == "phase_pairing")
                config.phase_pairing = value == "all"       ? PhasePairing::all
                                       : value == "matched" ? PhasePairing::matched
                                                            : throw UsageError("phase_pairing must be all or matched");
            else if (key == "denominator")
                config.denominator = share_denominator_from_string(value);
            else if (key == "mds_dims")
                config.mds_dims = static_cast<int>(parse_double(value));
            else if (key == "out_dir")
                config.out_dir = value;
            else
                fail(path, lineno, "unknown key '" + key + "'");
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            fail(path, lineno, e.what());
        }
    }

    try {
        validate_config(config);
    } catch (const UsageError& e) {
        throw UsageError(path + ": " + e.what());
    }
    return config;
}

}  // namespace pqcorr
