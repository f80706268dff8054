#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqcorr/rankcorr.hpp"

namespace pqcorr {

enum class Sense { positive, negative, absolute };

std::string to_string(Sense sense);
Sense sense_from_string(const std::string& text);

struct ThresholdRule {
    double tau = 0.7;
    Sense sense = Sense::positive;
};

// Indicator for one coefficient; absent coefficients are never significant.
bool significant(std::optional<double> r, const ThresholdRule& rule);

enum class ShareDenominator { total, valid };

std::string to_string(ShareDenominator d);
ShareDenominator share_denominator_from_string(const std::string& text);

// Per-pair counts of significant coefficients across M source matrices.
struct AggregationMatrix {
    std::vector<std::string> labels;
    std::vector<int> counts;  // row-major, symmetric
    std::vector<int> valid;   // matrices with a present entry, per pair
    int source_count = 0;     // M
    ThresholdRule rule;

    std::size_t size() const { return labels.size(); }
    int count(std::size_t i, std::size_t j) const { return counts[i * size() + j]; }

    // Share of significant matrices; `valid` divides by the per-pair number of
    // present entries instead of M (0 when nothing was present).
    double share(std::size_t i, std::size_t j, ShareDenominator d = ShareDenominator::total) const;
};

// c_ij = number of matrices whose (i,j) coefficient passes the rule. All
// matrices must carry the same label list.
AggregationMatrix aggregation_counts(std::span<const CorrelationMatrix> matrices,
                                     const ThresholdRule& rule);

struct ParameterShare {
    std::string parameter;
    int significant_pairs = 0;
    int total_pairs = 0;

    double share() const { return total_pairs == 0 ? 0.0 : static_cast<double>(significant_pairs) / total_pairs; }
};

// For each parameter's site matrix, the share of significant site pairs among
// the S(S-1)/2 distinct unordered pairs.
std::vector<ParameterShare> per_parameter_site_shares(std::span<const CorrelationMatrix> site_matrices,
                                                      const ThresholdRule& rule);

}  // namespace pqcorr
