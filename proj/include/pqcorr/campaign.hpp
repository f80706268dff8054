#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pqcorr {

enum class QuantityKind { voltage, current };

enum class Phase { L1, L2, L3, Total };

std::string to_string(Phase phase);
Phase phase_from_string(const std::string& text);

std::string to_string(QuantityKind kind);
QuantityKind quantity_kind_from_string(const std::string& text);

// One measured quantity, e.g. Urms or the 5th voltage harmonic. UNB is the
// only single-phase parameter in the default set.
struct ParameterId {
    std::string code;
    QuantityKind kind = QuantityKind::voltage;
    int phase_cardinality = 3;  // 1 or 3
    std::optional<int> harmonic_order;

    std::vector<Phase> phases() const;
};

// The 20 built-in parameters: Urms, Upst, UNB, Uthd, U03..U15 (odd), Irms,
// Ithc, I03..I15 (odd). 58 parameter-phase channels per site.
const std::vector<ParameterId>& default_parameters();
int channel_count(const std::vector<ParameterId>& parameters);

struct SiteId {
    std::string name;
    int voltage_level_kv = 110;  // 110 | 220 | 380
    std::string substation;
};

struct SeriesKey {
    std::string site;
    std::string parameter;
    Phase phase = Phase::L1;

    auto operator<=>(const SeriesKey&) const = default;
};

// Fixed 600 s cadence samples with per-slot missing values. Missing slots are
// stored as NaN internally; accessors expose them as empty optionals so NaN
// never enters arithmetic downstream.
class RegularTimeSeries {
public:
    static constexpr std::int64_t cadence_seconds = 600;

    RegularTimeSeries(std::int64_t start_epoch_seconds, std::vector<std::optional<double>> samples);

    // Fast path used by the generator and parser: NaN marks a missing slot,
    // every other value must be finite.
    static RegularTimeSeries from_raw(std::int64_t start_epoch_seconds, std::vector<double> raw);

    std::int64_t start() const { return start_; }
    std::int64_t end() const { return start_ + static_cast<std::int64_t>(raw_.size()) * cadence_seconds; }
    std::size_t size() const { return raw_.size(); }

    bool has(std::size_t i) const { return !std::isnan(raw_[i]); }
    double raw(std::size_t i) const { return raw_[i]; }

    std::optional<double> at(std::size_t i) const
    {
        double v = raw_[i];
        if (std::isnan(v)) return std::nullopt;
        return v;
    }

    std::int64_t timestamp(std::size_t i) const { return start_ + static_cast<std::int64_t>(i) * cadence_seconds; }

    // Value at an absolute grid slot (epoch seconds / 600); empty outside coverage.
    std::optional<double> at_slot(std::int64_t slot) const;

    std::int64_t start_slot() const;

private:
    struct raw_tag {};
    RegularTimeSeries(raw_tag, std::int64_t start, std::vector<double> raw)
        : start_(start), raw_(std::move(raw))
    {
    }

    std::int64_t start_ = 0;
    std::vector<double> raw_;
};

struct Campaign {
    std::vector<SiteId> sites;
    std::vector<ParameterId> parameters;
    std::map<SeriesKey, RegularTimeSeries> series;
    std::int64_t period_begin = 0;  // [begin, end) in epoch seconds
    std::int64_t period_end = 0;

    const RegularTimeSeries* find(const SeriesKey& key) const;
    const SiteId* find_site(const std::string& name) const;
    const ParameterId* find_parameter(const std::string& code) const;
};

// One calendar day of the campaign clock (UTC midnight + offset). first/count
// index into the sliced series; a full day holds 144 slots.
struct DaySlice {
    std::int64_t day_index = 0;  // days since epoch on the shifted clock
    std::size_t first = 0;
    std::size_t count = 0;
    bool partial = false;
};

std::vector<DaySlice> slice_days(const RegularTimeSeries& series, std::int64_t day_boundary_offset_s = 0);

// Absolute slot window [begin_slot, begin_slot + count).
struct SlotWindow {
    std::int64_t begin_slot = 0;
    std::size_t count = 0;
};

SlotWindow slot_window(const RegularTimeSeries& series, const DaySlice& slice);

struct AlignedPairs {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t count() const { return x.size(); }
};

// Pairs up the slots where both series carry a value, in temporal order.
// Throws DataError if the series do not share the 600 s grid.
AlignedPairs align_pairs(const RegularTimeSeries& a, const RegularTimeSeries& b, const SlotWindow& window);

// Allocation-free variant for hot loops; appends to the caller's buffers.
void align_pairs_into(const RegularTimeSeries& a, const RegularTimeSeries& b, const SlotWindow& window,
                      std::vector<double>& x, std::vector<double>& y);

}  // namespace pqcorr
