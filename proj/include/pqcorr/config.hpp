#pragma once

#include <cstdint>
#include <string>

#include "pqcorr/aggregate.hpp"
#include "pqcorr/rankcorr.hpp"

namespace pqcorr {

struct Config {
    double tau = 0.7;
    Sense sense = Sense::positive;
    int min_pairs = 72;
    double clamp_eps = 1e-7;
    std::int64_t day_offset_seconds = 0;
    PhasePairing phase_pairing = PhasePairing::all;
    ShareDenominator denominator = ShareDenominator::total;
    int mds_dims = 2;
    std::string out_dir = "out";

    CorrConfig corr() const { return {min_pairs, clamp_eps, day_offset_seconds, phase_pairing}; }
    ThresholdRule rule() const { return {tau, sense}; }
};

// Line-based `key = value` file; blank lines and #-comments allowed, unknown
// keys and out-of-range values are rejected with the line number.
Config load_config(const std::string& path);

// Validation shared by the file loader and CLI flag overrides.
void validate_config(const Config& config);

}  // namespace pqcorr
