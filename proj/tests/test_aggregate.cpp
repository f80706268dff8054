#include <doctest.h>

#include <random>

#include "pqcorr/aggregate.hpp"
#include "pqcorr/errors.hpp"

using namespace pqcorr;

namespace {

CorrelationMatrix make_matrix(const std::vector<std::string>& labels,
                              const std::vector<std::optional<double>>& upper, const std::string& ctx = "m")
{
    CorrelationMatrix m(MatrixMode::parameters_at_site, ctx, labels);
    std::size_t k = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i; j < labels.size(); ++j) m.set(i, j, upper[k++], 1);
    return m;
}

std::vector<CorrelationMatrix> random_matrices(std::mt19937_64& rng, std::size_t count,
                                               std::size_t n)
{
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("L" + std::to_string(i));
    std::vector<CorrelationMatrix> mats;
    for (std::size_t m = 0; m < count; ++m) {
        std::vector<std::optional<double>> upper;
        for (std::size_t k = 0; k < n * (n + 1) / 2; ++k) {
            if (rng() % 8 == 0)
                upper.push_back(std::nullopt);
            else
                upper.push_back(coeff(rng));
        }
        mats.push_back(make_matrix(labels, upper, "m" + std::to_string(m)));
    }
    return mats;
}

}  // namespace

TEST_CASE("significant: senses and absences")
{
    CHECK(significant(0.72, {0.7, Sense::positive}) == 1);
    CHECK(significant(0.69, {0.7, Sense::positive}) == 0);
    CHECK(significant(-0.9, {0.7, Sense::positive}) == 0);
    CHECK(significant(-0.9, {0.7, Sense::negative}) == 1);
    CHECK(significant(-0.9, {0.7, Sense::absolute}) == 1);
    CHECK(significant(0.7, {0.7, Sense::positive}) == 1);  // boundary inclusive
    CHECK(significant(std::nullopt, {0.7, Sense::positive}) == 0);
    CHECK(significant(std::nullopt, {0.7, Sense::negative}) == 0);
    CHECK(significant(std::nullopt, {0.7, Sense::absolute}) == 0);
}

TEST_CASE("aggregation_counts: hand-enumerated example")
{
    std::vector<std::string> labels{"A", "B"};
    std::vector<CorrelationMatrix> mats;
    for (double r : {0.9, 0.65, 0.72})
        mats.push_back(make_matrix(labels, {std::nullopt, r, std::nullopt}));

    auto agg = aggregation_counts(mats, {0.7, Sense::positive});
    CHECK(agg.source_count == 3);
    CHECK(agg.count(0, 1) == 2);
    CHECK(agg.count(1, 0) == 2);
    CHECK(agg.share(0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(agg.count(0, 0) == 0);
}

TEST_CASE("aggregation_counts: all below threshold yields the zero matrix")
{
    std::vector<std::string> labels{"A", "B", "C"};
    std::vector<CorrelationMatrix> mats;
    for (int m = 0; m < 4; ++m)
        mats.push_back(make_matrix(labels, {0.1, 0.2, 0.3, 0.1, 0.2, 0.1}));
    auto agg = aggregation_counts(mats, {0.7, Sense::positive});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(agg.count(i, j) == 0);
}

TEST_CASE("aggregation_counts: label mismatch is an error, bad tau rejected")
{
    auto a = make_matrix({"A", "B"}, {0.5, 0.5, 0.5});
    auto b = make_matrix({"A", "C"}, {0.5, 0.5, 0.5});
    std::vector<CorrelationMatrix> mats{a, b};
    CHECK_THROWS_AS(aggregation_counts(mats, {0.7, Sense::positive}), DataError);
    CHECK_THROWS_AS(aggregation_counts({}, {0.7, Sense::positive}), DataError);
    std::vector<CorrelationMatrix> one{a};
    CHECK_THROWS_AS(aggregation_counts(one, {1.5, Sense::positive}), std::invalid_argument);
}

TEST_CASE("aggregation over a single matrix is its indicator matrix")
{
    std::mt19937_64 rng(42);
    auto mats = random_matrices(rng, 1, 5);
    ThresholdRule rule{0.4, Sense::absolute};
    auto agg = aggregation_counts(mats, rule);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            int expect = significant(mats[0].at(i, j), rule) ? 1 : 0;
            CHECK(agg.count(i, j) == expect);
        }
    }
}

TEST_CASE("aggregation is invariant under input permutation")
{
    std::mt19937_64 rng(7);
    auto mats = random_matrices(rng, 6, 4);
    ThresholdRule rule{0.5, Sense::positive};
    auto base = aggregation_counts(mats, rule);
    std::shuffle(mats.begin(), mats.end(), rng);
    auto shuffled = aggregation_counts(mats, rule);
    CHECK(base.counts == shuffled.counts);
    CHECK(base.valid == shuffled.valid);
}

TEST_CASE("threshold monotonicity and sense consistency on fuzzed inputs")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> tau_dist(0.05, 1.0);
    for (int it = 0; it < 200; ++it) {
        auto mats = random_matrices(rng, 1 + rng() % 6, 2 + rng() % 5);
        double tau_lo = tau_dist(rng);
        double tau_hi = std::min(1.0, tau_lo + tau_dist(rng) * 0.5);

        for (Sense sense : {Sense::positive, Sense::negative, Sense::absolute}) {
            auto lo = aggregation_counts(mats, {tau_lo, sense});
            auto hi = aggregation_counts(mats, {tau_hi, sense});
            for (std::size_t k = 0; k < lo.counts.size(); ++k) CHECK(hi.counts[k] <= lo.counts[k]);
        }

        auto pos = aggregation_counts(mats, {tau_lo, Sense::positive});
        auto neg = aggregation_counts(mats, {tau_lo, Sense::negative});
        auto abs_agg = aggregation_counts(mats, {tau_lo, Sense::absolute});
        for (std::size_t k = 0; k < pos.counts.size(); ++k) {
            CHECK(abs_agg.counts[k] >= pos.counts[k]);
            CHECK(abs_agg.counts[k] >= neg.counts[k]);
        }
    }
}

TEST_CASE("share denominators: total vs valid")
{
    std::vector<std::string> labels{"A", "B"};
    std::vector<CorrelationMatrix> mats;
    mats.push_back(make_matrix(labels, {std::nullopt, 0.9, std::nullopt}));
    mats.push_back(make_matrix(labels, {std::nullopt, std::nullopt, std::nullopt}));
    auto agg = aggregation_counts(mats, {0.7, Sense::positive});
    CHECK(agg.count(0, 1) == 1);
    CHECK(agg.share(0, 1, ShareDenominator::total) == doctest::Approx(0.5));
    CHECK(agg.share(0, 1, ShareDenominator::valid) == doctest::Approx(1.0));
    CHECK(agg.share(0, 0, ShareDenominator::valid) == 0.0);  // nothing present
}

TEST_CASE("per_parameter_site_shares counts unordered pairs")
{
    std::vector<std::string> sites{"s1", "s2", "s3", "s4"};

    CorrelationMatrix all_one(MatrixMode::sites_for_parameter, "U03", sites);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) all_one.set(i, j, 1.0, 1);

    CorrelationMatrix two_pairs(MatrixMode::sites_for_parameter, "Upst", sites);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) two_pairs.set(i, j, 0.1, 1);
    two_pairs.set(0, 1, 0.95, 1);
    two_pairs.set(2, 3, 0.85, 1);

    std::vector<CorrelationMatrix> mats{all_one, two_pairs};
    auto shares = per_parameter_site_shares(mats, {0.7, Sense::positive});
    REQUIRE(shares.size() == 2);
    CHECK(shares[0].parameter == "U03");
    CHECK(shares[0].share() == doctest::Approx(1.0));
    CHECK(shares[1].parameter == "Upst");
    CHECK(shares[1].total_pairs == 6);
    CHECK(shares[1].significant_pairs == 2);
    CHECK(shares[1].share() == doctest::Approx(2.0 / 6.0));
}
