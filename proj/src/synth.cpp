#include "pqcorr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pqcorr/errors.hpp"
#include "pqcorr/parallel.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

namespace {

std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& s)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= 0x1f;  // separator so concatenated fields cannot collide
    h *= 1099511628211ULL;
    return h;
}

std::mt19937_64 stream(std::uint64_t seed, const std::string& a, const std::string& b,
                       const std::string& c)
{
    std::uint64_t h = 1469598103934665603ULL;
    h = fnv1a(h, a);
    h = fnv1a(h, b);
    h = fnv1a(h, c);
    return std::mt19937_64(mix64(seed ^ h));
}

// Smooth diurnal-looking profile: a few sinusoids on daily/weekly periods
// plus a slow random walk. One profile per group, shared by every
// (site, parameter, phase) series the group covers.
std::vector<double> latent_profile(std::uint64_t seed, std::size_t group_index, std::size_t n_samples)
{
    auto rng = stream(seed, "latent", std::to_string(group_index), "");
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // The first wave always sits in the daily band so every day carries
    // enough in-day variation for rank correlation to latch onto. Periods are
    // jittered inside their band: with exact shared periods two independent
    // profiles would correlate at cos of their phase difference, planting
    // structure where none is wanted.
    int n_waves = 1 + static_cast<int>(rng() % 3);
    std::vector<double> amplitude(static_cast<std::size_t>(n_waves)),
        period(static_cast<std::size_t>(n_waves)), shift(static_cast<std::size_t>(n_waves));
    for (int w = 0; w < n_waves; ++w) {
        if (w == 0) {
            period[w] = 86400.0 * (0.75 + 0.6 * unit(rng));
            amplitude[w] = 0.8 + 0.7 * unit(rng);
        } else {
            period[w] = rng() % 2 == 0 ? 86400.0 * (0.35 + 0.3 * unit(rng))   // half-day band
                                       : 86400.0 * (3.5 + 5.5 * unit(rng));   // weekly band
            amplitude[w] = 0.3 + 0.7 * unit(rng);
        }
        shift[w] = 2.0 * std::numbers::pi * unit(rng);
    }

    // Mean-reverting walk (correlation time two hours, stationary sd 0.8):
    // gives each profile an idiosyncratic in-day shape with enough effective
    // degrees of freedom per day that two independent profiles decorrelate,
    // and without the unbounded drift of a plain random walk.
    const double reversion = std::exp(-600.0 / 7200.0);
    const double stationary_sd = 0.8;
    std::normal_distribution<double> step(0.0, stationary_sd * std::sqrt(1.0 - reversion * reversion));
    std::vector<double> profile(n_samples);
    double walk = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double t = static_cast<double>(i) * 600.0;
        double v = 0.0;
        for (int w = 0; w < n_waves; ++w)
            v += amplitude[w] * std::sin(2.0 * std::numbers::pi * t / period[w] + shift[w]);
        walk = reversion * walk + step(rng);
        profile[i] = v + walk;
    }
    return profile;
}

}  // namespace

std::vector<SiteId> SynthSpec::sites() const
{
    std::vector<SiteId> out;
    out.reserve(static_cast<std::size_t>(sites_110 + sites_220 + sites_380));
    int substation = 0;
    auto add_level = [&](int level, int count) {
        for (int i = 1; i <= count; ++i) {
            char name[16], sub[16];
            std::snprintf(name, sizeof name, "S%d-%02d", level, i);
            std::snprintf(sub, sizeof sub, "SUB-%02d", substation % 50 + 1);
            ++substation;
            out.push_back({name, level, sub});
        }
    };
    add_level(110, sites_110);
    add_level(220, sites_220);
    add_level(380, sites_380);
    return out;
}

Campaign generate_campaign(const SynthSpec& spec, int threads)
{
    if (spec.days < 1) throw std::invalid_argument("campaign must span at least one day");
    if (spec.base_noise_sigma < 0.0) throw std::invalid_argument("noise sigma must be nonnegative");
    if (floor_mod(spec.start, 86400) != 0) throw std::invalid_argument("campaign start must be midnight-aligned");
    for (const auto& g : spec.groups) {
        if (g.sigma < 0.0 || g.day_shift_sigma < 0.0)
            throw std::invalid_argument("noise sigma must be nonnegative");
    }

    Campaign campaign;
    campaign.sites = spec.sites();
    campaign.parameters = spec.parameters;
    campaign.period_begin = spec.start;
    campaign.period_end = spec.start + static_cast<std::int64_t>(spec.days) * 86400;

    // (site, parameter) -> owning group; duplicates across groups are a spec error.
    std::map<std::pair<std::string, std::string>, std::size_t> membership;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        for (const auto& site : spec.groups[g].sites) {
            if (std::none_of(campaign.sites.begin(), campaign.sites.end(),
                             [&site](const SiteId& s) { return s.name == site; }))
                throw DataError("group references unknown site '" + site + "'");
            for (const auto& param : spec.groups[g].parameters) {
                if (campaign.find_parameter(param) == nullptr)
                    throw DataError("group references unknown parameter '" + param + "'");
                auto [it, inserted] = membership.insert({{site, param}, g});
                if (!inserted)
                    throw DataError("series (" + site + ", " + param + ") assigned to two groups");
            }
        }
    }

    const std::size_t n_samples = static_cast<std::size_t>(spec.days) * 144;

    // Shared profiles first, sequentially, so parallel series generation below
    // only reads them.
    std::vector<std::vector<double>> latents;
    latents.reserve(spec.groups.size());
    for (std::size_t g = 0; g < spec.groups.size(); ++g)
        latents.push_back(latent_profile(spec.seed, g, n_samples));

    struct Job {
        SeriesKey key;
        const std::vector<double>* latent = nullptr;
        double sigma = 0.0;
        double day_shift_sigma = 0.0;
    };
    std::vector<Job> jobs;
    for (const auto& site : campaign.sites) {
        for (const auto& param : campaign.parameters) {
            auto member = membership.find({site.name, param.code});
            for (Phase phase : param.phases()) {
                Job job;
                job.key = {site.name, param.code, phase};
                if (member != membership.end()) {
                    const auto& group = spec.groups[member->second];
                    job.latent = &latents[member->second];
                    job.sigma = group.sigma;
                    job.day_shift_sigma = group.day_shift_sigma;
                } else {
                    job.sigma = spec.base_noise_sigma;
                }
                jobs.push_back(std::move(job));
            }
        }
    }

    std::vector<std::vector<double>> values(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t idx) {
        const Job& job = jobs[idx];
        auto rng = stream(spec.seed, job.key.site, job.key.parameter, to_string(job.key.phase));
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::vector<double> shifts(static_cast<std::size_t>(spec.days), 0.0);
        if (job.day_shift_sigma > 0.0)
            for (auto& s : shifts) s = job.day_shift_sigma * gauss(rng);

        std::vector<double> v(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) {
            double base = job.latent ? (*job.latent)[i] : 0.0;
            v[i] = base + shifts[i / 144] + job.sigma * gauss(rng);
        }
        values[idx] = std::move(v);
    });

    for (std::size_t i = 0; i < jobs.size(); ++i)
        campaign.series.emplace(jobs[i].key, RegularTimeSeries::from_raw(spec.start, std::move(values[i])));
    return campaign;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, std::initializer_list<const char*> known,
                         const std::string& where)
{
    for (const auto& [key, value] : object.items()) {
        if (std::none_of(known.begin(), known.end(),
                         [&key](const char* k) { return key == k; }))
            throw DataError("unknown key '" + key + "' in " + where);
    }
}

}  // namespace

SynthSpec load_synth_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open synth spec '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("synth spec '" + path + "': " + e.what());
    }

    reject_unknown_keys(doc, {"seed", "days", "start", "sites_per_level", "parameters",
                              "base_noise_sigma", "groups"},
                        "synth spec");

    SynthSpec spec;
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("days")) spec.days = doc["days"].get<int>();
    if (doc.contains("start")) spec.start = parse_iso8601_utc(doc["start"].get<std::string>());
    if (doc.contains("base_noise_sigma")) spec.base_noise_sigma = doc["base_noise_sigma"].get<double>();
    if (doc.contains("sites_per_level")) {
        const auto& levels = doc["sites_per_level"];
        reject_unknown_keys(levels, {"110", "220", "380"}, "sites_per_level");
        spec.sites_110 = levels.value("110", 0);
        spec.sites_220 = levels.value("220", 0);
        spec.sites_380 = levels.value("380", 0);
    }
    if (doc.contains("parameters")) {
        spec.parameters.clear();
        for (const auto& code : doc["parameters"]) {
            auto c = code.get<std::string>();
            const auto& all = default_parameters();
            auto it = std::find_if(all.begin(), all.end(),
                                   [&c](const ParameterId& p) { return p.code == c; });
            if (it == all.end()) throw DataError("synth spec references unknown parameter '" + c + "'");
            spec.parameters.push_back(*it);
        }
    }
    if (doc.contains("groups")) {
        for (const auto& g : doc["groups"]) {
            reject_unknown_keys(g, {"sites", "parameters", "sigma", "day_shift_sigma"}, "group");
            SynthGroup group;
            group.sites = g.at("sites").get<std::vector<std::string>>();
            group.parameters = g.at("parameters").get<std::vector<std::string>>();
            group.sigma = g.value("sigma", 0.1);
            group.day_shift_sigma = g.value("day_shift_sigma", 0.0);
            spec.groups.push_back(std::move(group));
        }
    }
    return spec;
}

void save_synth_spec(const SynthSpec& spec, const std::string& path)
{
    json doc;
    doc["seed"] = spec.seed;
    doc["days"] = spec.days;
    doc["start"] = format_iso8601_utc(spec.start);
    doc["sites_per_level"] = {{"110", spec.sites_110}, {"220", spec.sites_220}, {"380", spec.sites_380}};
    doc["base_noise_sigma"] = spec.base_noise_sigma;
    std::vector<std::string> codes;
    for (const auto& p : spec.parameters) codes.push_back(p.code);
    doc["parameters"] = codes;
    doc["groups"] = json::array();
    for (const auto& g : spec.groups) {
        doc["groups"].push_back({{"sites", g.sites},
                                 {"parameters", g.parameters},
                                 {"sigma", g.sigma},
                                 {"day_shift_sigma", g.day_shift_sigma}});
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write synth spec '" + path + "'");
    out << doc.dump(2) << "\n";
}

}  // namespace pqcorr
