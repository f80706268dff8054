#include "pqcorr/rankcorr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pqcorr/errors.hpp"
#include "pqcorr/parallel.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

namespace {

// Reused buffers for the per-day correlation loop.
struct Scratch {
    std::vector<double> x, y, rx, ry;
    std::vector<std::uint32_t> order;
};

void rank_into(std::span<const double> values, std::vector<std::uint32_t>& order,
               std::vector<double>& ranks)
{
    const std::size_t n = values.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&values](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });

    ranks.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Tied block covers 1-based positions i+1 .. j.
        double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
}

CorrOutcome pearson_unchecked(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2) return {std::nullopt, CorrError::insufficient_data};

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return {std::nullopt, CorrError::constant_input};

    double r = sxy / std::sqrt(sxx * syy);
    return {std::clamp(r, -1.0, 1.0), CorrError::none};
}

CorrOutcome spearman_scratch(Scratch& s)
{
    rank_into(s.x, s.order, s.rx);
    rank_into(s.y, s.order, s.ry);
    return pearson_unchecked(s.rx, s.ry);
}

void require_finite(std::span<const double> values, const char* what)
{
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("cannot rank an empty sequence");
    require_finite(values, "rank input");
    std::vector<std::uint32_t> order;
    std::vector<double> ranks;
    rank_into(values, order, ranks);
    return ranks;
}

CorrOutcome pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("correlation inputs must have equal length");
    require_finite(x, "correlation input");
    require_finite(y, "correlation input");
    return pearson_unchecked(x, y);
}

CorrOutcome spearman(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw std::invalid_argument("correlation inputs must have equal length");
    if (x.size() < 2) return {std::nullopt, CorrError::insufficient_data};
    require_finite(x, "correlation input");
    require_finite(y, "correlation input");
    Scratch s;
    s.x.assign(x.begin(), x.end());
    s.y.assign(y.begin(), y.end());
    return spearman_scratch(s);
}

namespace {

std::vector<DailyCorrelation> daily_spearman_scratch(const RegularTimeSeries& a,
                                                     const RegularTimeSeries& b, int min_pairs,
                                                     std::int64_t day_offset_seconds, Scratch& s)
{
    if (min_pairs < 3) throw std::invalid_argument("min_pairs must be at least 3");
    if (day_offset_seconds < 0 || day_offset_seconds >= 86400)
        throw std::invalid_argument("day boundary offset must lie in [0, 86400)");

    std::int64_t first_day =
        std::min(floor_div(a.start() - day_offset_seconds, 86400), floor_div(b.start() - day_offset_seconds, 86400));
    std::int64_t last_day = std::max(floor_div(a.end() - 600 - day_offset_seconds, 86400),
                                     floor_div(b.end() - 600 - day_offset_seconds, 86400));

    std::vector<DailyCorrelation> out;
    out.reserve(static_cast<std::size_t>(last_day - first_day + 1));
    for (std::int64_t day = first_day; day <= last_day; ++day) {
        // All 144 slots whose timestamps fall in [day*86400+offset, +86400).
        std::int64_t t0 = day * 86400 + day_offset_seconds;
        std::int64_t begin_slot = floor_div(t0 + 599, 600);
        s.x.clear();
        s.y.clear();
        align_pairs_into(a, b, {begin_slot, 144}, s.x, s.y);
        DailyCorrelation dc;
        dc.day_index = day;
        dc.n_pairs = static_cast<int>(s.x.size());
        if (dc.n_pairs >= min_pairs) dc.r = spearman_scratch(s).r;
        out.push_back(dc);
    }
    return out;
}

}  // namespace

std::vector<DailyCorrelation> daily_spearman(const RegularTimeSeries& a, const RegularTimeSeries& b,
                                             int min_pairs, std::int64_t day_offset_seconds)
{
    Scratch s;
    return daily_spearman_scratch(a, b, min_pairs, day_offset_seconds, s);
}

std::optional<double> fisher_mean(std::span<const std::optional<double>> rs, double clamp_eps)
{
    if (!(clamp_eps > 0.0) || clamp_eps > 1e-3)
        throw std::invalid_argument("clamp_eps must lie in (0, 1e-3]");
    const double limit = 1.0 - clamp_eps;
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rs) {
        if (!r) continue;
        sum += std::atanh(std::clamp(*r, -limit, limit));
        ++n;
    }
    if (n == 0) return std::nullopt;
    return std::tanh(sum / static_cast<double>(n));
}

CorrOutcome whole_period_spearman(const RegularTimeSeries& a, const RegularTimeSeries& b)
{
    std::int64_t begin = std::min(a.start_slot(), b.start_slot());
    std::int64_t end = std::max(a.start_slot() + static_cast<std::int64_t>(a.size()),
                                b.start_slot() + static_cast<std::int64_t>(b.size()));
    AlignedPairs pairs = align_pairs(a, b, {begin, static_cast<std::size_t>(end - begin)});
    return spearman(pairs.x, pairs.y);
}

namespace {

struct ComboSpec {
    Phase phase_a;
    Phase phase_b;
};

PhaseAggregate aggregate_combos(const RegularTimeSeries* const* left, const RegularTimeSeries* const* right,
                                std::span<const ComboSpec> combos, const CorrConfig& cfg, Scratch& s)
{
    std::vector<std::optional<double>> combo_means;
    combo_means.reserve(combos.size());
    PhaseAggregate agg;
    std::vector<std::optional<double>> day_rs;
    for (const auto& combo : combos) {
        const RegularTimeSeries* sa = left[static_cast<int>(combo.phase_a)];
        const RegularTimeSeries* sb = right[static_cast<int>(combo.phase_b)];
        if (sa == nullptr || sb == nullptr) continue;
        auto daily = daily_spearman_scratch(*sa, *sb, cfg.min_pairs, cfg.day_offset_seconds, s);
        day_rs.clear();
        for (const auto& d : daily) day_rs.push_back(d.r);
        auto mean = fisher_mean(day_rs, cfg.clamp_eps);
        if (mean) {
            ++agg.n_combinations;
            agg.n_days += static_cast<int>(std::count_if(day_rs.begin(), day_rs.end(),
                                                         [](const auto& r) { return r.has_value(); }));
        }
        combo_means.push_back(mean);
    }
    agg.r = fisher_mean(combo_means, cfg.clamp_eps);
    return agg;
}

// Series per phase slot, indexed by the Phase enum value; missing -> nullptr.
void collect_phases(const Campaign& campaign, const std::string& site, const ParameterId& param,
                    const RegularTimeSeries** out)
{
    out[0] = out[1] = out[2] = out[3] = nullptr;
    for (Phase phase : param.phases())
        out[static_cast<int>(phase)] = campaign.find({site, param.code, phase});
}

bool any_phase(const RegularTimeSeries* const* series)
{
    return series[0] || series[1] || series[2] || series[3];
}

PhaseAggregate phase_aggregate_scratch(const std::string& site, const std::string& param_i,
                                       const std::string& param_j, const Campaign& campaign,
                                       const CorrConfig& cfg, Scratch& s)
{
    const ParameterId* pi = campaign.find_parameter(param_i);
    const ParameterId* pj = campaign.find_parameter(param_j);
    if (pi == nullptr) throw DataError("unknown parameter '" + param_i + "'");
    if (pj == nullptr) throw DataError("unknown parameter '" + param_j + "'");

    const RegularTimeSeries* left[4];
    const RegularTimeSeries* right[4];
    collect_phases(campaign, site, *pi, left);
    collect_phases(campaign, site, *pj, right);
    if (!any_phase(left)) throw DataError("parameter '" + param_i + "' not measured at site '" + site + "'");
    if (!any_phase(right)) throw DataError("parameter '" + param_j + "' not measured at site '" + site + "'");

    std::vector<ComboSpec> combos;
    if (param_i == param_j) {
        // Cross-phase pairs only; each unordered pair once (its transpose gives
        // the same coefficient and would not change the Fisher mean).
        auto phases = pi->phases();
        for (std::size_t a = 0; a < phases.size(); ++a)
            for (std::size_t b = a + 1; b < phases.size(); ++b) combos.push_back({phases[a], phases[b]});
    } else {
        for (Phase pa : pi->phases())
            for (Phase pb : pj->phases()) combos.push_back({pa, pb});
    }
    return aggregate_combos(left, right, combos, cfg, s);
}

PhaseAggregate site_pair_aggregate_scratch(const std::string& site_i, const std::string& site_j,
                                           const std::string& parameter, const Campaign& campaign,
                                           const CorrConfig& cfg, Scratch& s)
{
    const ParameterId* param = campaign.find_parameter(parameter);
    if (param == nullptr) throw DataError("unknown parameter '" + parameter + "'");

    const RegularTimeSeries* left[4];
    const RegularTimeSeries* right[4];
    collect_phases(campaign, site_i, *param, left);
    collect_phases(campaign, site_j, *param, right);
    if (!any_phase(left)) throw DataError("parameter '" + parameter + "' not measured at site '" + site_i + "'");
    if (!any_phase(right)) throw DataError("parameter '" + parameter + "' not measured at site '" + site_j + "'");

    std::vector<ComboSpec> combos;
    for (Phase pa : param->phases()) {
        for (Phase pb : param->phases()) {
            if (cfg.phase_pairing == PhasePairing::matched && pa != pb) continue;
            combos.push_back({pa, pb});
        }
    }
    return aggregate_combos(left, right, combos, cfg, s);
}

}  // namespace

PhaseAggregate phase_aggregate(const std::string& site, const std::string& param_i,
                               const std::string& param_j, const Campaign& campaign,
                               const CorrConfig& cfg)
{
    Scratch s;
    return phase_aggregate_scratch(site, param_i, param_j, campaign, cfg, s);
}

PhaseAggregate site_pair_aggregate(const std::string& site_i, const std::string& site_j,
                                   const std::string& parameter, const Campaign& campaign,
                                   const CorrConfig& cfg)
{
    Scratch s;
    return site_pair_aggregate_scratch(site_i, site_j, parameter, campaign, cfg, s);
}

std::string to_string(MatrixMode mode)
{
    return mode == MatrixMode::parameters_at_site ? "parameters-at-site" : "sites-for-parameter";
}

MatrixMode matrix_mode_from_string(const std::string& text)
{
    if (text == "parameters-at-site") return MatrixMode::parameters_at_site;
    if (text == "sites-for-parameter") return MatrixMode::sites_for_parameter;
    throw DataError("unknown matrix mode '" + text + "'");
}

CorrelationMatrix::CorrelationMatrix(MatrixMode mode, std::string context, std::vector<std::string> labels)
    : mode_(mode),
      context_(std::move(context)),
      labels_(std::move(labels)),
      values_(labels_.size() * labels_.size(), std::numeric_limits<double>::quiet_NaN()),
      days_(labels_.size() * labels_.size(), 0)
{
}

std::optional<double> CorrelationMatrix::at(std::size_t i, std::size_t j) const
{
    double v = values_[i * size() + j];
    if (std::isnan(v)) return std::nullopt;
    return v;
}

void CorrelationMatrix::set(std::size_t i, std::size_t j, std::optional<double> r, int n_days)
{
    double v = r ? *r : std::numeric_limits<double>::quiet_NaN();
    values_[i * size() + j] = v;
    values_[j * size() + i] = v;
    days_[i * size() + j] = n_days;
    days_[j * size() + i] = n_days;
}

CorrelationMatrix parameter_matrix(const Campaign& campaign, const std::string& site,
                                   const CorrConfig& cfg, int threads)
{
    if (campaign.find_site(site) == nullptr) throw DataError("unknown site '" + site + "'");

    std::vector<std::string> labels;
    labels.reserve(campaign.parameters.size());
    for (const auto& p : campaign.parameters) labels.push_back(p.code);

    CorrelationMatrix matrix(MatrixMode::parameters_at_site, site, labels);
    matrix.period_begin = campaign.period_begin;
    matrix.period_end = campaign.period_end;

    const std::size_t n = labels.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<PhaseAggregate> results(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        thread_local Scratch scratch;
        results[k] = phase_aggregate_scratch(site, labels[pairs[k].first], labels[pairs[k].second],
                                             campaign, cfg, scratch);
    });
    for (std::size_t k = 0; k < pairs.size(); ++k)
        matrix.set(pairs[k].first, pairs[k].second, results[k].r, results[k].n_days);
    return matrix;
}

std::vector<CorrelationMatrix> site_matrices(const Campaign& campaign, const CorrConfig& cfg, int threads)
{
    if (campaign.sites.size() < 2) throw DataError("site correlation needs at least two sites");

    std::vector<std::string> site_labels;
    site_labels.reserve(campaign.sites.size());
    for (const auto& s : campaign.sites) site_labels.push_back(s.name);
    const std::size_t n_sites = site_labels.size();

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n_sites * (n_sites - 1) / 2);
    for (std::size_t i = 0; i < n_sites; ++i)
        for (std::size_t j = i + 1; j < n_sites; ++j) pairs.emplace_back(i, j);

    std::vector<CorrelationMatrix> matrices;
    matrices.reserve(campaign.parameters.size());
    for (const auto& param : campaign.parameters) {
        CorrelationMatrix m(MatrixMode::sites_for_parameter, param.code, site_labels);
        m.period_begin = campaign.period_begin;
        m.period_end = campaign.period_end;
        matrices.push_back(std::move(m));
    }

    // One work item per (parameter, site pair); results land in fixed slots.
    const std::size_t per_param = pairs.size();
    std::vector<PhaseAggregate> results(campaign.parameters.size() * per_param);
    parallel_for(results.size(), threads, [&](std::size_t k) {
        thread_local Scratch scratch;
        const auto& param = campaign.parameters[k / per_param];
        const auto& pair = pairs[k % per_param];
        results[k] = site_pair_aggregate_scratch(site_labels[pair.first], site_labels[pair.second],
                                                 param.code, campaign, cfg, scratch);
    });
    for (std::size_t p = 0; p < campaign.parameters.size(); ++p) {
        for (std::size_t k = 0; k < per_param; ++k) {
            const auto& agg = results[p * per_param + k];
            matrices[p].set(pairs[k].first, pairs[k].second, agg.r, agg.n_days);
        }
    }
    return matrices;
}

}  // namespace pqcorr
