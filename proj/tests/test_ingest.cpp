#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "pqcorr/errors.hpp"
#include "pqcorr/ingest.hpp"
#include "pqcorr/synth.hpp"
#include "testutil.hpp"

using namespace pqcorr;

namespace {

const std::string kManifest = "site,voltage_level,substation\nES1,380,SUB-A\n";

std::string full_day_rows(const std::string& site, const std::string& param,
                          const std::vector<std::string>& phases)
{
    std::ostringstream os;
    for (int i = 0; i < 144; ++i) {
        int h = i / 6, m = (i % 6) * 10;
        char ts[32];
        std::snprintf(ts, sizeof ts, "2024-01-01T%02d:%02d:00Z", h, m);
        for (const auto& ph : phases)
            os << ts << ',' << site << ',' << param << ',' << ph << ',' << 0.1 * i + 1.0 << '\n';
    }
    return os.str();
}

}  // namespace

TEST_CASE("parse: one three-phase parameter over a complete day")
{
    testutil::TempDir dir("ingest");
    testutil::write_file(dir.file("manifest.csv"), kManifest);
    testutil::write_file(dir.file("measurements.csv"),
                         "timestamp,site,parameter,phase,value\n" +
                             full_day_rows("ES1", "Uthd", {"L1", "L2", "L3"}));

    Campaign c = parse_campaign_dir(dir.str());
    CHECK(c.sites.size() == 1);
    CHECK(c.sites[0].voltage_level_kv == 380);
    CHECK(c.parameters.size() == 20);
    REQUIRE(c.series.size() == 3);
    for (Phase ph : {Phase::L1, Phase::L2, Phase::L3}) {
        const auto* s = c.find({"ES1", "Uthd", ph});
        REQUIRE(s != nullptr);
        CHECK(s->size() == 144);
        CHECK(s->at(1) == doctest::Approx(1.1));
    }
    CHECK(c.period_begin == 1704067200);
    CHECK(c.period_end == 1704067200 + 86400);
}

TEST_CASE("parse error paths name the offending row")
{
    testutil::TempDir dir("ingest-err");
    testutil::write_file(dir.file("manifest.csv"), kManifest);
    const std::string header = "timestamp,site,parameter,phase,value\n";

    auto expect_error = [&](const std::string& rows, const std::string& needle) {
        testutil::write_file(dir.file("measurements.csv"), header + rows);
        try {
            parse_campaign_dir(dir.str());
            FAIL_CHECK("expected DataError for: " << needle);
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error("2024-01-01T00:00:00Z,ES1,Uthd,L1,1.0\n2024-01-01T00:00:00Z,ES1,Uthd,L1,2.0\n",
                 "duplicate record");
    expect_error("2024-01-01T00:13:00Z,ES1,Uthd,L1,1.0\n", "10-minute grid");
    expect_error("2024-01-01T00:00:00Z,ES9,Uthd,L1,1.0\n", "unknown site");
    expect_error("2024-01-01T00:00:00Z,ES1,Zap,L1,1.0\n", "unknown parameter");
    expect_error("2024-01-01T00:00:00Z,ES1,UNB,L1,1.0\n", "inconsistent");
    expect_error("2024-01-01T00:00:00Z,ES1,Uthd,TOTAL,1.0\n", "inconsistent");
    expect_error("2024-01-01T00:00:00Z,ES1,Uthd,L1,abc\n", "invalid numeric");
    expect_error("not-a-time,ES1,Uthd,L1,1.0\n", "invalid timestamp");
    expect_error("2024-01-01T00:00:00Z,ES1,Uthd,L1\n", "expected 5 fields");
    expect_error("2024-01-01T00:00:00Z,ES1,Uthd,L1,inf\n", "invalid numeric");
}

TEST_CASE("parse: duplicate manifest rows and bad levels rejected")
{
    testutil::TempDir dir("ingest-manifest");
    testutil::write_file(dir.file("measurements.csv"), "timestamp,site,parameter,phase,value\n");

    testutil::write_file(dir.file("manifest.csv"),
                         "site,voltage_level,substation\nA,110,s\nA,220,s\n");
    CHECK_THROWS_AS(parse_campaign_dir(dir.str()), DataError);

    testutil::write_file(dir.file("manifest.csv"), "site,voltage_level,substation\nA,115,s\n");
    CHECK_THROWS_AS(parse_campaign_dir(dir.str()), DataError);
}

TEST_CASE("parse is insensitive to row order")
{
    testutil::TempDir dir("ingest-shuffle");
    testutil::write_file(dir.file("manifest.csv"), kManifest);
    std::string rows = full_day_rows("ES1", "Urms", {"L1", "L2", "L3"});

    std::vector<std::string> lines;
    std::istringstream is(rows);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    std::shuffle(lines.begin(), lines.end(), std::mt19937_64(12345));
    std::string shuffled = "timestamp,site,parameter,phase,value\n";
    for (const auto& l : lines) shuffled += l + "\n";

    testutil::write_file(dir.file("measurements.csv"),
                         "timestamp,site,parameter,phase,value\n" + rows);
    Campaign ordered = parse_campaign_dir(dir.str());
    testutil::write_file(dir.file("measurements.csv"), shuffled);
    Campaign permuted = parse_campaign_dir(dir.str());

    REQUIRE(ordered.series.size() == permuted.series.size());
    for (const auto& [key, series] : ordered.series) {
        const auto* other = permuted.find(key);
        REQUIRE(other != nullptr);
        CHECK(other->start() == series.start());
        REQUIRE(other->size() == series.size());
        for (std::size_t i = 0; i < series.size(); ++i) CHECK(series.at(i) == other->at(i));
    }
}

TEST_CASE("write + parse round-trips a campaign bit-exactly")
{
    SynthSpec spec;
    spec.sites_110 = 2;
    spec.sites_220 = 1;
    spec.sites_380 = 0;
    spec.days = 2;
    spec.seed = 31337;
    spec.groups.push_back({{"S110-01", "S110-02"}, {"U05"}, 0.3, 0.5});
    Campaign original = generate_campaign(spec);

    testutil::TempDir dir("roundtrip");
    write_campaign_dir(original, dir.str());
    Campaign parsed = parse_campaign_dir(dir.str());

    CHECK(parsed.sites.size() == original.sites.size());
    for (std::size_t i = 0; i < parsed.sites.size(); ++i) {
        CHECK(parsed.sites[i].name == original.sites[i].name);
        CHECK(parsed.sites[i].voltage_level_kv == original.sites[i].voltage_level_kv);
        CHECK(parsed.sites[i].substation == original.sites[i].substation);
    }
    REQUIRE(parsed.parameters.size() == original.parameters.size());
    for (std::size_t i = 0; i < parsed.parameters.size(); ++i) {
        CHECK(parsed.parameters[i].code == original.parameters[i].code);
        CHECK(parsed.parameters[i].kind == original.parameters[i].kind);
        CHECK(parsed.parameters[i].phase_cardinality == original.parameters[i].phase_cardinality);
        CHECK(parsed.parameters[i].harmonic_order == original.parameters[i].harmonic_order);
    }
    REQUIRE(parsed.series.size() == original.series.size());
    for (const auto& [key, series] : original.series) {
        const auto* other = parsed.find(key);
        REQUIRE(other != nullptr);
        CHECK(other->start() == series.start());
        REQUIRE(other->size() == series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            REQUIRE(other->has(i) == series.has(i));
            if (series.has(i)) CHECK(other->raw(i) == series.raw(i));  // bit-exact
        }
    }
}

TEST_CASE("round-trip preserves missing slots, including leading ones")
{
    Campaign c;
    c.sites = {{"X", 110, "SUB"}};
    c.parameters = default_parameters();
    std::vector<std::optional<double>> vals{std::nullopt, 1.5, std::nullopt, 2.25, std::nullopt};
    c.series.emplace(SeriesKey{"X", "UNB", Phase::Total}, RegularTimeSeries(1704067200, vals));
    c.period_begin = 1704067200;
    c.period_end = 1704067200 + 86400;

    testutil::TempDir dir("missing");
    write_campaign_dir(c, dir.str());
    Campaign parsed = parse_campaign_dir(dir.str());
    const auto* s = parsed.find({"X", "UNB", Phase::Total});
    REQUIRE(s != nullptr);
    CHECK(s->start() == 1704067200);
    REQUIRE(s->size() == 5);
    CHECK_FALSE(s->has(0));
    CHECK(s->at(1) == 1.5);
    CHECK_FALSE(s->has(2));
    CHECK(s->at(3) == 2.25);
    CHECK_FALSE(s->has(4));
}

TEST_CASE("validate_campaign coverage and gaps")
{
    Campaign c;
    c.sites = {{"X", 110, "SUB"}};
    c.parameters = default_parameters();

    std::vector<std::optional<double>> half(144);
    for (std::size_t i = 0; i < half.size(); ++i)
        half[i] = (i % 2 == 0) ? std::optional<double>{1.0 * static_cast<double>(i)} : std::nullopt;
    c.series.emplace(SeriesKey{"X", "UNB", Phase::Total}, RegularTimeSeries(1704067200, half));
    c.series.emplace(SeriesKey{"X", "Urms", Phase::L1},
                     RegularTimeSeries::from_raw(1704067200, std::vector<double>(144, 5.0)));

    auto report = validate_campaign(c);
    REQUIRE(report.series.size() == 2);
    for (const auto& s : report.series) {
        if (s.key.parameter == "UNB") {
            CHECK(s.coverage == doctest::Approx(0.5));
            CHECK(s.gap_count == 72);
            CHECK(s.max_gap == 1);
        } else {
            CHECK(s.coverage == doctest::Approx(1.0));
            CHECK(s.gap_count == 0);
        }
        CHECK(s.grid_aligned);
    }
    CHECK(report.grid_violations == 0);

    Campaign empty;
    CHECK(validate_campaign(empty).series.empty());
}

TEST_CASE("custom parameters.csv drives the parameter set")
{
    testutil::TempDir dir("params");
    testutil::write_file(dir.file("manifest.csv"), kManifest);
    testutil::write_file(dir.file("parameters.csv"),
                         "code,kind,phase_cardinality,harmonic_order\nFoo,voltage,3,\nBar,current,1,5\n");
    testutil::write_file(dir.file("measurements.csv"),
                         "timestamp,site,parameter,phase,value\n"
                         "2024-01-01T00:00:00Z,ES1,Foo,L2,1.0\n"
                         "2024-01-01T00:00:00Z,ES1,Bar,TOTAL,2.0\n");
    Campaign c = parse_campaign_dir(dir.str());
    REQUIRE(c.parameters.size() == 2);
    CHECK(c.parameters[0].code == "Foo");
    CHECK_FALSE(c.parameters[0].harmonic_order.has_value());
    CHECK(c.parameters[1].harmonic_order == 5);
    CHECK(c.find({"ES1", "Bar", Phase::Total}) != nullptr);

    testutil::write_file(dir.file("parameters.csv"),
                         "code,kind,phase_cardinality,harmonic_order\nFoo,voltage,2,\n");
    CHECK_THROWS_AS(parse_campaign_dir(dir.str()), DataError);
}
