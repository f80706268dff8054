#include "pqcorr/aggregate.hpp"

#include <cmath>
#include <stdexcept>

#include "pqcorr/errors.hpp"

namespace pqcorr {

std::string to_string(Sense sense)
{
    switch (sense) {
        case Sense::positive: return "positive";
        case Sense::negative: return "negative";
        case Sense::absolute: return "absolute";
    }
    return "?";
}

Sense sense_from_string(const std::string& text)
{
    if (text == "positive") return Sense::positive;
    if (text == "negative") return Sense::negative;
    if (text == "absolute") return Sense::absolute;
    throw DataError("unknown threshold sense '" + text + "'");
}

std::string to_string(ShareDenominator d)
{
    return d == ShareDenominator::total ? "total" : "valid";
}

ShareDenominator share_denominator_from_string(const std::string& text)
{
    if (text == "total") return ShareDenominator::total;
    if (text == "valid") return ShareDenominator::valid;
    throw DataError("unknown share denominator '" + text + "'");
}

bool significant(std::optional<double> r, const ThresholdRule& rule)
{
    if (!r) return false;
    switch (rule.sense) {
        case Sense::positive: return *r >= rule.tau;
        case Sense::negative: return *r <= -rule.tau;
        case Sense::absolute: return std::abs(*r) >= rule.tau;
    }
    return false;
}

double AggregationMatrix::share(std::size_t i, std::size_t j, ShareDenominator d) const
{
    int denom = d == ShareDenominator::total ? source_count : valid[i * size() + j];
    if (denom == 0) return 0.0;
    return static_cast<double>(count(i, j)) / static_cast<double>(denom);
}

AggregationMatrix aggregation_counts(std::span<const CorrelationMatrix> matrices,
                                     const ThresholdRule& rule)
{
    if (matrices.empty()) throw DataError("aggregation needs at least one matrix");
    if (!(rule.tau > 0.0) || rule.tau > 1.0) throw std::invalid_argument("tau must lie in (0, 1]");

    const auto& labels = matrices.front().labels();
    for (const auto& m : matrices) {
        if (m.labels() != labels)
            throw DataError("aggregation inputs disagree on labels (matrix '" + m.context() + "')");
    }

    AggregationMatrix agg;
    agg.labels = labels;
    agg.source_count = static_cast<int>(matrices.size());
    agg.rule = rule;
    const std::size_t n = labels.size();
    agg.counts.assign(n * n, 0);
    agg.valid.assign(n * n, 0);
    for (const auto& m : matrices) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                auto r = m.at(i, j);
                if (r) ++agg.valid[i * n + j];
                if (significant(r, rule)) ++agg.counts[i * n + j];
            }
        }
    }
    return agg;
}

std::vector<ParameterShare> per_parameter_site_shares(std::span<const CorrelationMatrix> site_mats,
                                                      const ThresholdRule& rule)
{
    std::vector<ParameterShare> shares;
    shares.reserve(site_mats.size());
    if (site_mats.empty()) return shares;

    const auto& labels = site_mats.front().labels();
    for (const auto& m : site_mats) {
        if (m.labels() != labels)
            throw DataError("site matrices disagree on labels (matrix '" + m.context() + "')");
    }

    const std::size_t n = labels.size();
    for (const auto& m : site_mats) {
        ParameterShare ps;
        ps.parameter = m.context();
        ps.total_pairs = static_cast<int>(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (significant(m.at(i, j), rule)) ++ps.significant_pairs;
        shares.push_back(ps);
    }
    return shares;
}

}  // namespace pqcorr
