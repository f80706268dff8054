#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqcorr/campaign.hpp"

namespace pqcorr {

enum class CorrError { none, insufficient_data, constant_input };

struct CorrOutcome {
    std::optional<double> r;
    CorrError reason = CorrError::none;
};

// Average ranks in 1..n, ties receive the mean of their covered positions.
// The rank sum is always n(n+1)/2.
std::vector<double> average_ranks(std::span<const double> values);

// Plain Pearson coefficient over centered sums, clamped to [-1, 1] against
// floating-point overshoot.
CorrOutcome pearson(std::span<const double> x, std::span<const double> y);

// Spearman = Pearson applied to average ranks of both inputs.
CorrOutcome spearman(std::span<const double> x, std::span<const double> y);

struct DailyCorrelation {
    std::int64_t day_index = 0;
    std::optional<double> r;
    int n_pairs = 0;
};

// One Spearman coefficient per campaign-clock day over the union of both
// series' coverage. Days with fewer than min_pairs aligned pairs or with a
// constant day slice report an absent r; n_pairs is always filled in.
std::vector<DailyCorrelation> daily_spearman(const RegularTimeSeries& a, const RegularTimeSeries& b,
                                             int min_pairs, std::int64_t day_offset_seconds = 0);

// Fisher-z mean: clamp each r into [-(1-eps), 1-eps], average arctanh in input
// order, transform back. Absent entries are skipped; empty input yields absent.
std::optional<double> fisher_mean(std::span<const std::optional<double>> rs, double clamp_eps);

// Single Spearman coefficient over every aligned pair of the full overlap.
CorrOutcome whole_period_spearman(const RegularTimeSeries& a, const RegularTimeSeries& b);

enum class PhasePairing { all, matched };

struct CorrConfig {
    int min_pairs = 72;
    double clamp_eps = 1e-7;
    std::int64_t day_offset_seconds = 0;
    PhasePairing phase_pairing = PhasePairing::all;  // site-to-site pairs only
};

struct PhaseAggregate {
    std::optional<double> r;
    int n_combinations = 0;  // phase combinations that produced a coefficient
    int n_days = 0;          // daily coefficients summed over combinations
};

// Two-stage Fisher average for one parameter pair at one site: daily Spearman
// and Fisher mean per phase combination, then a Fisher mean across the
// combinations. For a parameter against itself the same-phase pairs (which are
// identically 1) are excluded, so the diagonal measures cross-phase consistency.
PhaseAggregate phase_aggregate(const std::string& site, const std::string& param_i,
                               const std::string& param_j, const Campaign& campaign,
                               const CorrConfig& cfg);

// Same aggregation for one parameter between two sites; combinations pair the
// phases across sites (all 9 or matched only, per cfg.phase_pairing).
PhaseAggregate site_pair_aggregate(const std::string& site_i, const std::string& site_j,
                                   const std::string& parameter, const Campaign& campaign,
                                   const CorrConfig& cfg);

enum class MatrixMode { parameters_at_site, sites_for_parameter };

std::string to_string(MatrixMode mode);
MatrixMode matrix_mode_from_string(const std::string& text);

// Symmetric matrix of phase-aggregated mean coefficients; NaN encodes absent.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;
    CorrelationMatrix(MatrixMode mode, std::string context, std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    MatrixMode mode() const { return mode_; }
    const std::string& context() const { return context_; }

    std::optional<double> at(std::size_t i, std::size_t j) const;
    int day_count(std::size_t i, std::size_t j) const { return days_[i * size() + j]; }
    void set(std::size_t i, std::size_t j, std::optional<double> r, int n_days);

    std::int64_t period_begin = 0;
    std::int64_t period_end = 0;

private:
    MatrixMode mode_ = MatrixMode::parameters_at_site;
    std::string context_;  // site name or parameter code the matrix belongs to
    std::vector<std::string> labels_;
    std::vector<double> values_;
    std::vector<int> days_;
};

// N_params x N_params matrix for one site (all parameter pairs, phase-aggregated).
CorrelationMatrix parameter_matrix(const Campaign& campaign, const std::string& site,
                                   const CorrConfig& cfg, int threads = 1);

// For every parameter, an S x S matrix of site-to-site coefficients with an
// absent diagonal. Returned in campaign parameter order.
std::vector<CorrelationMatrix> site_matrices(const Campaign& campaign, const CorrConfig& cfg,
                                             int threads = 1);

}  // namespace pqcorr
