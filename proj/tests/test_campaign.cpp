#include <doctest.h>

#include <numeric>

#include "pqcorr/campaign.hpp"
#include "pqcorr/errors.hpp"
#include "pqcorr/timeutil.hpp"

using namespace pqcorr;

namespace {

RegularTimeSeries constant_series(std::int64_t start, std::size_t n, double value = 1.0)
{
    return RegularTimeSeries::from_raw(start, std::vector<double>(n, value));
}

constexpr std::int64_t kDay0 = 1704067200;  // 2024-01-01T00:00:00Z

}  // namespace

TEST_CASE("default parameter set shape")
{
    const auto& params = default_parameters();
    CHECK(params.size() == 20);
    CHECK(channel_count(params) == 58);

    int singles = 0;
    for (const auto& p : params) {
        if (p.phase_cardinality == 1) {
            ++singles;
            CHECK(p.code == "UNB");
        }
        if (p.harmonic_order) {
            CHECK(*p.harmonic_order >= 3);
            CHECK(*p.harmonic_order <= 15);
            CHECK(*p.harmonic_order % 2 == 1);
        }
    }
    CHECK(singles == 1);
}

TEST_CASE("phase tags follow cardinality")
{
    const auto& params = default_parameters();
    for (const auto& p : params) {
        auto phases = p.phases();
        if (p.phase_cardinality == 1) {
            REQUIRE(phases.size() == 1);
            CHECK(phases[0] == Phase::Total);
        } else {
            REQUIRE(phases.size() == 3);
            CHECK(phases[0] == Phase::L1);
        }
    }
    CHECK(phase_from_string("TOTAL") == Phase::Total);
    CHECK_THROWS_AS(phase_from_string("L4"), DataError);
}

TEST_CASE("series construction rejects bad values")
{
    CHECK_THROWS_AS(RegularTimeSeries(kDay0, {}), std::invalid_argument);
    CHECK_THROWS_AS(RegularTimeSeries(kDay0, {std::optional<double>{1.0 / 0.0}}), std::invalid_argument);
    RegularTimeSeries s(kDay0, {1.0, std::nullopt, 3.0});
    CHECK(s.size() == 3);
    CHECK(s.at(0) == 1.0);
    CHECK_FALSE(s.at(1).has_value());
    CHECK(s.timestamp(2) == kDay0 + 1200);
    CHECK(s.at_slot(kDay0 / 600) == 1.0);
    CHECK_FALSE(s.at_slot(kDay0 / 600 - 1).has_value());
}

TEST_CASE("slice_days: thirty complete days")
{
    auto s = constant_series(kDay0, 30 * 144);
    auto slices = slice_days(s);
    REQUIRE(slices.size() == 30);
    for (const auto& slice : slices) {
        CHECK(slice.count == 144);
        CHECK_FALSE(slice.partial);
    }
    CHECK(slices.front().day_index == kDay0 / 86400);
}

TEST_CASE("slice_days: noon-to-noon spans three days with partial ends")
{
    auto s = constant_series(kDay0 + 43200, 288);  // noon day0 .. noon day2
    auto slices = slice_days(s);
    REQUIRE(slices.size() == 3);
    CHECK(slices[0].partial);
    CHECK(slices[0].count == 72);
    CHECK_FALSE(slices[1].partial);
    CHECK(slices[1].count == 144);
    CHECK(slices[2].partial);
    CHECK(slices[2].count == 72);
}

TEST_CASE("slice_days: offset boundaries match a brute-force timestamp scan")
{
    const std::int64_t offset = 3600;
    auto s = constant_series(kDay0, 3 * 144 + 17);
    auto slices = slice_days(s, offset);

    // Oracle: assign each sample to a day by scanning timestamps directly.
    std::vector<std::pair<std::int64_t, std::size_t>> expected;  // (day, count)
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::int64_t day = (s.timestamp(i) - offset) / 86400;
        if ((s.timestamp(i) - offset) % 86400 < 0) --day;
        if (expected.empty() || expected.back().first != day)
            expected.push_back({day, 0});
        ++expected.back().second;
    }
    REQUIRE(slices.size() == expected.size());
    for (std::size_t k = 0; k < slices.size(); ++k) {
        CHECK(slices[k].day_index == expected[k].first);
        CHECK(slices[k].count == expected[k].second);
        CHECK(slices[k].partial == (expected[k].second < 144));
    }
    // First boundary sits at 01:00 UTC: the first slice holds the six
    // 00:00..00:50 samples of the previous clock day.
    CHECK(slices[0].count == 6);
}

TEST_CASE("slice_days partitions every sample exactly once")
{
    auto s = constant_series(kDay0 + 7 * 600, 1000);
    for (std::int64_t offset : {0L, 3600L, 86399L}) {
        auto slices = slice_days(s, offset);
        std::size_t total = 0;
        std::size_t expect_first = 0;
        for (const auto& slice : slices) {
            CHECK(slice.first == expect_first);
            expect_first = slice.first + slice.count;
            total += slice.count;
        }
        CHECK(total == s.size());
    }
    CHECK_THROWS_AS(slice_days(s, -1), std::invalid_argument);
    CHECK_THROWS_AS(slice_days(s, 86400), std::invalid_argument);
}

TEST_CASE("re-slicing a rebuilt series is idempotent")
{
    auto s = constant_series(kDay0 + 43200, 300);
    auto slices = slice_days(s, 120);
    std::vector<std::optional<double>> samples;
    for (std::size_t i = 0; i < s.size(); ++i) samples.push_back(s.at(i));
    RegularTimeSeries rebuilt(s.start(), samples);
    auto again = slice_days(rebuilt, 120);
    REQUIRE(slices.size() == again.size());
    for (std::size_t k = 0; k < slices.size(); ++k) {
        CHECK(slices[k].day_index == again[k].day_index);
        CHECK(slices[k].first == again[k].first);
        CHECK(slices[k].count == again[k].count);
    }
}

TEST_CASE("align_pairs: complete series pair fully")
{
    auto a = constant_series(kDay0, 144, 1.0);
    auto b = constant_series(kDay0, 144, 2.0);
    auto pairs = align_pairs(a, b, {kDay0 / 600, 144});
    CHECK(pairs.count() == 144);
}

TEST_CASE("align_pairs: missing slots intersect")
{
    std::vector<std::optional<double>> va(12, 1.0), vb(12, 2.0);
    va[3] = std::nullopt;
    va[7] = std::nullopt;
    vb[7] = std::nullopt;
    vb[9] = std::nullopt;
    RegularTimeSeries a(kDay0, va), b(kDay0, vb);
    auto pairs = align_pairs(a, b, {kDay0 / 600, 12});
    CHECK(pairs.count() == 9);

    auto flipped = align_pairs(b, a, {kDay0 / 600, 12});
    CHECK(flipped.count() == pairs.count());
}

TEST_CASE("align_pairs: disjoint coverage yields nothing")
{
    auto a = constant_series(kDay0, 10);
    auto b = constant_series(kDay0 + 86400, 10);
    auto pairs = align_pairs(a, b, {kDay0 / 600, 288});
    CHECK(pairs.count() == 0);
}

TEST_CASE("align_pairs rejects series off the shared grid")
{
    auto a = constant_series(kDay0, 10);
    auto b = constant_series(kDay0 + 90, 10);
    CHECK_THROWS_AS(align_pairs(a, b, {kDay0 / 600, 10}), DataError);
}

TEST_CASE("align_pairs with different grid-aligned starts")
{
    auto a = constant_series(kDay0, 20, 1.0);
    auto b = constant_series(kDay0 + 6000, 20, 2.0);  // shifted by 10 slots
    auto pairs = align_pairs(a, b, {kDay0 / 600, 40});
    CHECK(pairs.count() == 10);
}

TEST_CASE("iso8601 round trip and rejection")
{
    CHECK(parse_iso8601_utc("2024-01-01T00:00:00Z") == kDay0);
    CHECK(format_iso8601_utc(kDay0 + 600) == "2024-01-01T00:10:00Z");
    CHECK(parse_iso8601_utc(format_iso8601_utc(123456600)) == 123456600);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-01-01 00:00:00Z"), DataError);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-01-01T00:00:00"), DataError);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-01-01T00:00:00+01"), DataError);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-13-01T00:00:00Z"), DataError);
    CHECK_THROWS_AS(parse_iso8601_utc("2024-02-30T00:00:00Z"), DataError);
}

TEST_CASE("floor_div handles negatives")
{
    CHECK(floor_div(-1, 86400) == -1);
    CHECK(floor_div(0, 86400) == 0);
    CHECK(floor_div(-86400, 86400) == -1);
    CHECK(floor_mod(-1, 600) == 599);
}
