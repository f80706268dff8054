#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqcorr/campaign.hpp"

namespace pqcorr {

// Sites whose listed parameters follow one shared smooth daily profile plus
// per-site noise. day_shift_sigma adds an independent per-series level jump
// each day, which keeps daily correlations high while pulling the
// whole-period coefficient down.
struct SynthGroup {
    std::vector<std::string> sites;
    std::vector<std::string> parameters;
    double sigma = 0.1;
    double day_shift_sigma = 0.0;
};

struct SynthSpec {
    int sites_110 = 38;
    int sites_220 = 21;
    int sites_380 = 26;
    std::vector<ParameterId> parameters = default_parameters();
    int days = 30;
    std::int64_t start = 1704067200;  // 2024-01-01T00:00:00Z, midnight-aligned
    double base_noise_sigma = 1.0;
    std::vector<SynthGroup> groups;
    std::uint64_t seed = 42;

    std::vector<SiteId> sites() const;
};

// Fully populated campaign (no missing slots). Bit-identical for identical
// (spec, seed) at any worker count: every series draws from its own RNG
// stream keyed on (seed, site, parameter, phase).
Campaign generate_campaign(const SynthSpec& spec, int threads = 1);

SynthSpec load_synth_spec(const std::string& path);
void save_synth_spec(const SynthSpec& spec, const std::string& path);

}  // namespace pqcorr
