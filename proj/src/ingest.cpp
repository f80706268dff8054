#include "pqcorr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string_view>
#include <unordered_map>

#include "pqcorr/errors.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail_row(const std::string& path, std::size_t line, const std::string& why)
{
    throw DataError(path + ":" + std::to_string(line) + ": " + why);
}

// Splits one CSV line into views. The schemas use a restricted identifier
// charset without quoting, so a plain comma scan is enough.
void split_csv(std::string_view line, std::vector<std::string_view>& fields)
{
    fields.clear();
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool valid_identifier(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-' || c == '.' || c == ':' || c == ' ';
        if (!ok) return false;
    }
    return true;
}

std::ifstream open_or_fail(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

void chomp(std::string& line)
{
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

void expect_header(std::ifstream& in, const std::string& path, const std::string& expected)
{
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    chomp(line);
    if (line != expected) throw DataError(path + ": expected header '" + expected + "', got '" + line + "'");
}

struct Record {
    std::int64_t timestamp;
    double value;  // NaN = missing
    std::uint32_t line;
};

}  // namespace

std::vector<ParameterId> load_parameters_csv(const std::string& path)
{
    auto in = open_or_fail(path);
    expect_header(in, path, "code,kind,phase_cardinality,harmonic_order");

    std::vector<ParameterId> params;
    std::vector<std::string_view> fields;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        split_csv(line, fields);
        if (fields.size() != 4) fail_row(path, lineno, "expected 4 fields");
        ParameterId p;
        p.code = std::string(fields[0]);
        if (!valid_identifier(p.code)) fail_row(path, lineno, "invalid parameter code");
        p.kind = quantity_kind_from_string(std::string(fields[1]));
        if (fields[2] == "1")
            p.phase_cardinality = 1;
        else if (fields[2] == "3")
            p.phase_cardinality = 3;
        else
            fail_row(path, lineno, "phase_cardinality must be 1 or 3");
        if (!fields[3].empty()) p.harmonic_order = static_cast<int>(parse_double(std::string(fields[3])));
        if (std::any_of(params.begin(), params.end(),
                        [&p](const ParameterId& q) { return q.code == p.code; }))
            fail_row(path, lineno, "duplicate parameter code '" + p.code + "'");
        params.push_back(std::move(p));
    }
    if (params.empty()) throw DataError(path + ": no parameters defined");
    return params;
}

std::vector<SiteId> load_manifest_csv(const std::string& path)
{
    auto in = open_or_fail(path);
    expect_header(in, path, "site,voltage_level,substation");

    std::vector<SiteId> sites;
    std::vector<std::string_view> fields;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        split_csv(line, fields);
        if (fields.size() != 3) fail_row(path, lineno, "expected 3 fields");
        SiteId site;
        site.name = std::string(fields[0]);
        if (!valid_identifier(site.name)) fail_row(path, lineno, "invalid site name");
        if (fields[1] == "110")
            site.voltage_level_kv = 110;
        else if (fields[1] == "220")
            site.voltage_level_kv = 220;
        else if (fields[1] == "380")
            site.voltage_level_kv = 380;
        else
            fail_row(path, lineno, "voltage_level must be one of 110, 220, 380");
        site.substation = std::string(fields[2]);
        if (std::any_of(sites.begin(), sites.end(),
                        [&site](const SiteId& s) { return s.name == site.name; }))
            fail_row(path, lineno, "duplicate site '" + site.name + "'");
        sites.push_back(std::move(site));
    }
    return sites;
}

Campaign parse_measurements(const std::string& measurements_path, const std::string& manifest_path,
                            const std::string& parameters_path)
{
    Campaign campaign;
    campaign.parameters =
        parameters_path.empty() ? default_parameters() : load_parameters_csv(parameters_path);
    campaign.sites = load_manifest_csv(manifest_path);

    std::unordered_map<std::string, int> site_index;
    for (const auto& s : campaign.sites) site_index.emplace(s.name, static_cast<int>(site_index.size()));
    std::unordered_map<std::string, const ParameterId*> param_index;
    for (const auto& p : campaign.parameters) param_index.emplace(p.code, &p);

    std::vector<SeriesKey> keys;
    std::vector<std::vector<Record>> records;
    std::unordered_map<std::string, std::size_t> key_index;
    std::string key_buf;
    {
        auto in = open_or_fail(measurements_path);
        expect_header(in, measurements_path, "timestamp,site,parameter,phase,value");
        std::vector<std::string_view> fields;
        std::string line;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            chomp(line);
            if (line.empty()) continue;
            split_csv(line, fields);
            if (fields.size() != 5) fail_row(measurements_path, lineno, "expected 5 fields");

            std::int64_t t;
            try {
                t = parse_iso8601_utc(fields[0]);
            } catch (const DataError& e) {
                fail_row(measurements_path, lineno, e.what());
            }
            if (t % 600 != 0)
                fail_row(measurements_path, lineno, "timestamp not on the 10-minute grid");

            double value = std::numeric_limits<double>::quiet_NaN();
            if (!fields[4].empty()) {
                auto res = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), value);
                if (res.ec != std::errc{} || res.ptr != fields[4].data() + fields[4].size() ||
                    !std::isfinite(value))
                    fail_row(measurements_path, lineno,
                             "invalid numeric value '" + std::string(fields[4]) + "'");
            }

            key_buf.assign(fields[1]);
            key_buf += '\x1f';
            key_buf += fields[2];
            key_buf += '\x1f';
            key_buf += fields[3];
            auto it = key_index.find(key_buf);
            std::size_t idx;
            if (it != key_index.end()) {
                idx = it->second;
            } else {
                if (!site_index.contains(std::string(fields[1])))
                    fail_row(measurements_path, lineno, "unknown site '" + std::string(fields[1]) + "'");
                auto pit = param_index.find(std::string(fields[2]));
                if (pit == param_index.end())
                    fail_row(measurements_path, lineno,
                             "unknown parameter '" + std::string(fields[2]) + "'");
                const ParameterId* param = pit->second;
                Phase phase;
                try {
                    phase = phase_from_string(std::string(fields[3]));
                } catch (const DataError& e) {
                    fail_row(measurements_path, lineno, e.what());
                }
                bool phase_ok =
                    param->phase_cardinality == 1 ? phase == Phase::Total : phase != Phase::Total;
                if (!phase_ok)
                    fail_row(measurements_path, lineno,
                             "phase " + to_string(phase) + " inconsistent with parameter '" +
                                 param->code + "' (cardinality " +
                                 std::to_string(param->phase_cardinality) + ")");
                idx = keys.size();
                keys.push_back({std::string(fields[1]), std::string(fields[2]), phase});
                records.emplace_back();
                key_index.emplace(key_buf, idx);
            }
            records[idx].push_back({t, value, static_cast<std::uint32_t>(lineno)});
        }
    }

    for (std::size_t k = 0; k < keys.size(); ++k) {
        auto& recs = records[k];
        std::sort(recs.begin(), recs.end(),
                  [](const Record& a, const Record& b) { return a.timestamp < b.timestamp; });
        for (std::size_t i = 1; i < recs.size(); ++i) {
            if (recs[i].timestamp == recs[i - 1].timestamp)
                fail_row(measurements_path, std::max(recs[i].line, recs[i - 1].line),
                         "duplicate record for (" + keys[k].site + ", " + keys[k].parameter + ", " +
                             to_string(keys[k].phase) + ") at " + format_iso8601_utc(recs[i].timestamp));
        }
        std::int64_t start = recs.front().timestamp;
        std::size_t length = static_cast<std::size_t>((recs.back().timestamp - start) / 600 + 1);
        std::vector<double> values(length, std::numeric_limits<double>::quiet_NaN());
        for (const auto& r : recs) values[static_cast<std::size_t>((r.timestamp - start) / 600)] = r.value;
        campaign.series.emplace(keys[k], RegularTimeSeries::from_raw(start, std::move(values)));
        recs.clear();
        recs.shrink_to_fit();
    }

    if (!campaign.series.empty()) {
        std::int64_t lo = std::numeric_limits<std::int64_t>::max();
        std::int64_t hi = std::numeric_limits<std::int64_t>::min();
        for (const auto& [key, s] : campaign.series) {
            lo = std::min(lo, s.start());
            hi = std::max(hi, s.end());
        }
        campaign.period_begin = floor_div(lo, 86400) * 86400;
        campaign.period_end = floor_div(hi + 86399, 86400) * 86400;
    }
    return campaign;
}

Campaign parse_campaign_dir(const std::string& dir)
{
    fs::path base(dir);
    std::string params = fs::exists(base / "parameters.csv") ? (base / "parameters.csv").string() : "";
    return parse_measurements((base / "measurements.csv").string(), (base / "manifest.csv").string(),
                              params);
}

ValidationReport validate_campaign(const Campaign& campaign)
{
    ValidationReport report;
    for (const auto& [key, series] : campaign.series) {
        SeriesStats stats;
        stats.key = key;
        stats.length = series.size();
        std::size_t gap = 0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series.has(i)) {
                ++stats.present;
                if (gap > 0) {
                    ++stats.gap_count;
                    stats.max_gap = std::max(stats.max_gap, gap);
                    gap = 0;
                }
            } else {
                ++gap;
            }
        }
        if (gap > 0) {
            ++stats.gap_count;
            stats.max_gap = std::max(stats.max_gap, gap);
        }
        stats.coverage = static_cast<double>(stats.present) / static_cast<double>(stats.length);
        stats.grid_aligned = series.start() % 600 == 0;
        if (!stats.grid_aligned) ++report.grid_violations;
        report.series.push_back(std::move(stats));
    }
    return report;
}

void write_measurements(const Campaign& campaign, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "timestamp,site,parameter,phase,value\n";
    std::string buf;
    for (const auto& [key, series] : campaign.series) {
        const std::string prefix = "," + key.site + "," + key.parameter + "," + to_string(key.phase) + ",";
        for (std::size_t i = 0; i < series.size(); ++i) {
            buf = format_iso8601_utc(series.timestamp(i));
            buf += prefix;
            if (series.has(i)) buf += format_double(series.raw(i));
            buf += '\n';
            out << buf;
        }
    }
}

void write_manifest(const Campaign& campaign, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "site,voltage_level,substation\n";
    for (const auto& site : campaign.sites)
        out << site.name << ',' << site.voltage_level_kv << ',' << site.substation << '\n';
}

void write_parameters(const Campaign& campaign, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "code,kind,phase_cardinality,harmonic_order\n";
    for (const auto& p : campaign.parameters) {
        out << p.code << ',' << to_string(p.kind) << ',' << p.phase_cardinality << ',';
        if (p.harmonic_order) out << *p.harmonic_order;
        out << '\n';
    }
}

void write_campaign_dir(const Campaign& campaign, const std::string& dir)
{
    fs::create_directories(dir);
    fs::path base(dir);
    write_measurements(campaign, (base / "measurements.csv").string());
    write_manifest(campaign, (base / "manifest.csv").string());
    write_parameters(campaign, (base / "parameters.csv").string());
}

}  // namespace pqcorr
