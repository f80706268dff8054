#include "pqcorr/campaign.hpp"

#include <algorithm>
#include <stdexcept>

#include "pqcorr/errors.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

std::string to_string(Phase phase)
{
    switch (phase) {
        case Phase::L1: return "L1";
        case Phase::L2: return "L2";
        case Phase::L3: return "L3";
        case Phase::Total: return "TOTAL";
    }
    return "?";
}

Phase phase_from_string(const std::string& text)
{
    if (text == "L1") return Phase::L1;
    if (text == "L2") return Phase::L2;
    if (text == "L3") return Phase::L3;
    if (text == "TOTAL") return Phase::Total;
    throw DataError("unknown phase '" + text + "'");
}

std::string to_string(QuantityKind kind)
{
    return kind == QuantityKind::voltage ? "voltage" : "current";
}

QuantityKind quantity_kind_from_string(const std::string& text)
{
    if (text == "voltage") return QuantityKind::voltage;
    if (text == "current") return QuantityKind::current;
    throw DataError("unknown quantity kind '" + text + "'");
}

std::vector<Phase> ParameterId::phases() const
{
    if (phase_cardinality == 1) return {Phase::Total};
    return {Phase::L1, Phase::L2, Phase::L3};
}

const std::vector<ParameterId>& default_parameters()
{
    static const std::vector<ParameterId> params = [] {
        std::vector<ParameterId> p;
        auto add = [&p](std::string code, QuantityKind kind, int cardinality,
                        std::optional<int> order = std::nullopt) {
            p.push_back({std::move(code), kind, cardinality, order});
        };
        add("Urms", QuantityKind::voltage, 3);
        add("Upst", QuantityKind::voltage, 3);
        add("UNB", QuantityKind::voltage, 1);
        add("Uthd", QuantityKind::voltage, 3);
        for (int h = 3; h <= 15; h += 2) {
            char code[8];
            std::snprintf(code, sizeof code, "U%02d", h);
            add(code, QuantityKind::voltage, 3, h);
        }
        add("Irms", QuantityKind::current, 3);
        add("Ithc", QuantityKind::current, 3);
        for (int h = 3; h <= 15; h += 2) {
            char code[8];
            std::snprintf(code, sizeof code, "I%02d", h);
            add(code, QuantityKind::current, 3, h);
        }
        return p;
    }();
    return params;
}

int channel_count(const std::vector<ParameterId>& parameters)
{
    int n = 0;
    for (const auto& p : parameters) n += p.phase_cardinality;
    return n;
}

RegularTimeSeries::RegularTimeSeries(std::int64_t start_epoch_seconds,
                                     std::vector<std::optional<double>> samples)
    : start_(start_epoch_seconds)
{
    if (samples.empty()) throw std::invalid_argument("time series must hold at least one slot");
    raw_.reserve(samples.size());
    for (const auto& s : samples) {
        if (s && !std::isfinite(*s))
            throw std::invalid_argument("time series values must be finite when present");
        raw_.push_back(s ? *s : std::numeric_limits<double>::quiet_NaN());
    }
}

RegularTimeSeries RegularTimeSeries::from_raw(std::int64_t start_epoch_seconds, std::vector<double> raw)
{
    if (raw.empty()) throw std::invalid_argument("time series must hold at least one slot");
    for (double v : raw) {
        if (std::isinf(v)) throw std::invalid_argument("time series values must be finite when present");
    }
    return RegularTimeSeries(raw_tag{}, start_epoch_seconds, std::move(raw));
}

std::optional<double> RegularTimeSeries::at_slot(std::int64_t slot) const
{
    std::int64_t i = slot - start_slot();
    if (i < 0 || i >= static_cast<std::int64_t>(raw_.size())) return std::nullopt;
    return at(static_cast<std::size_t>(i));
}

std::int64_t RegularTimeSeries::start_slot() const
{
    return floor_div(start_, cadence_seconds);
}

const RegularTimeSeries* Campaign::find(const SeriesKey& key) const
{
    auto it = series.find(key);
    return it == series.end() ? nullptr : &it->second;
}

const SiteId* Campaign::find_site(const std::string& name) const
{
    for (const auto& s : sites)
        if (s.name == name) return &s;
    return nullptr;
}

const ParameterId* Campaign::find_parameter(const std::string& code) const
{
    for (const auto& p : parameters)
        if (p.code == code) return &p;
    return nullptr;
}

std::vector<DaySlice> slice_days(const RegularTimeSeries& series, std::int64_t day_boundary_offset_s)
{
    if (day_boundary_offset_s < 0 || day_boundary_offset_s >= 86400)
        throw std::invalid_argument("day boundary offset must lie in [0, 86400)");

    std::vector<DaySlice> slices;
    const std::size_t n = series.size();
    std::size_t i = 0;
    while (i < n) {
        std::int64_t day = floor_div(series.timestamp(i) - day_boundary_offset_s, 86400);
        // Slots in this day: timestamps in [day*86400 + offset, (day+1)*86400 + offset).
        std::int64_t day_end = (day + 1) * 86400 + day_boundary_offset_s;
        std::size_t j = i;
        while (j < n && series.timestamp(j) < day_end) ++j;
        slices.push_back({day, i, j - i, (j - i) < 144});
        i = j;
    }
    return slices;
}

SlotWindow slot_window(const RegularTimeSeries& series, const DaySlice& slice)
{
    return {series.start_slot() + static_cast<std::int64_t>(slice.first), slice.count};
}

static void check_grid(const RegularTimeSeries& a, const RegularTimeSeries& b)
{
    if (floor_mod(a.start() - b.start(), RegularTimeSeries::cadence_seconds) != 0)
        throw DataError("series are not aligned to a common 600 s grid");
}

void align_pairs_into(const RegularTimeSeries& a, const RegularTimeSeries& b, const SlotWindow& window,
                      std::vector<double>& x, std::vector<double>& y)
{
    check_grid(a, b);
    const std::int64_t a0 = a.start_slot();
    const std::int64_t b0 = b.start_slot();
    const std::int64_t an = static_cast<std::int64_t>(a.size());
    const std::int64_t bn = static_cast<std::int64_t>(b.size());

    std::int64_t begin = window.begin_slot;
    std::int64_t end = begin + static_cast<std::int64_t>(window.count);
    begin = std::max({begin, a0, b0});
    end = std::min({end, a0 + an, b0 + bn});
    for (std::int64_t s = begin; s < end; ++s) {
        double va = a.raw(static_cast<std::size_t>(s - a0));
        double vb = b.raw(static_cast<std::size_t>(s - b0));
        if (std::isnan(va) || std::isnan(vb)) continue;
        x.push_back(va);
        y.push_back(vb);
    }
}

AlignedPairs align_pairs(const RegularTimeSeries& a, const RegularTimeSeries& b, const SlotWindow& window)
{
    AlignedPairs pairs;
    align_pairs_into(a, b, window, pairs.x, pairs.y);
    return pairs;
}

}  // namespace pqcorr
