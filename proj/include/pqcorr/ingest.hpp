#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqcorr/campaign.hpp"

namespace pqcorr {

struct SeriesStats {
    SeriesKey key;
    std::size_t length = 0;
    std::size_t present = 0;
    double coverage = 0.0;  // present / length
    int gap_count = 0;      // runs of missing slots
    std::size_t max_gap = 0;
    bool grid_aligned = true;  // start on the 600 s grid
};

struct ValidationReport {
    std::vector<SeriesStats> series;
    int grid_violations = 0;
    int duplicate_records = 0;
};

// Reads manifest.csv + measurements.csv (+ parameters.csv when present next to
// them). Rows may arrive in any order; duplicate (site, parameter, phase,
// timestamp) records and off-grid timestamps are errors.
Campaign parse_measurements(const std::string& measurements_path, const std::string& manifest_path,
                            const std::string& parameters_path = "");

// Convenience: parse from a directory holding measurements.csv, manifest.csv
// and optionally parameters.csv.
Campaign parse_campaign_dir(const std::string& dir);

ValidationReport validate_campaign(const Campaign& campaign);

// Writers emit the same schemas the parser accepts; a written campaign parses
// back bit-exact (values use shortest round-trip decimals).
void write_measurements(const Campaign& campaign, const std::string& path);
void write_manifest(const Campaign& campaign, const std::string& path);
void write_parameters(const Campaign& campaign, const std::string& path);
void write_campaign_dir(const Campaign& campaign, const std::string& dir);

std::vector<ParameterId> load_parameters_csv(const std::string& path);
std::vector<SiteId> load_manifest_csv(const std::string& path);

}  // namespace pqcorr
