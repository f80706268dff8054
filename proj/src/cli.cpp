#include "pqcorr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pqcorr/config.hpp"
#include "pqcorr/errors.hpp"
#include "pqcorr/ingest.hpp"
#include "pqcorr/io.hpp"
#include "pqcorr/parallel.hpp"
#include "pqcorr/render.hpp"
#include "pqcorr/structure.hpp"
#include "pqcorr/synth.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolName = "pqcorr";
constexpr const char* kToolVersion = "0.1.0";

struct CommonOptions {
    std::string config_path;
    std::optional<double> tau;
    std::optional<std::string> sense;
    std::optional<int> min_pairs;
    std::optional<double> clamp_eps;
    std::optional<std::int64_t> day_offset;
    std::optional<std::string> phase_pairing;
    std::optional<std::string> denominator;
    std::optional<int> mds_dims;
    std::string out_dir;
    int threads = default_thread_count();

    Config resolve() const
    {
        Config config;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv("PQCORR_CONFIG")) path = env;
        }
        if (!path.empty()) config = load_config(path);

        if (tau) config.tau = *tau;
        if (sense) config.sense = sense_from_string(*sense);
        if (min_pairs) config.min_pairs = *min_pairs;
        if (clamp_eps) config.clamp_eps = *clamp_eps;
        if (day_offset) config.day_offset_seconds = *day_offset;
        if (phase_pairing) {
            if (*phase_pairing == "all")
                config.phase_pairing = PhasePairing::all;
            else if (*phase_pairing == "matched")
                config.phase_pairing = PhasePairing::matched;
            else
                throw UsageError("phase_pairing must be all or matched");
        }
        if (denominator) config.denominator = share_denominator_from_string(*denominator);
        if (mds_dims) config.mds_dims = *mds_dims;
        if (!out_dir.empty()) config.out_dir = out_dir;

        try {
            validate_config(config);
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
        return config;
    }
};

void add_common_options(CLI::App* sub, CommonOptions& opts, bool with_analysis_knobs = true)
{
    sub->add_option("--config", opts.config_path, "config file (key = value lines)");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--threads", opts.threads, "worker cap for parallel stages")
        ->check(CLI::PositiveNumber);
    if (with_analysis_knobs) {
        sub->add_option("--tau", opts.tau, "significance threshold in (0, 1]");
        sub->add_option("--sense", opts.sense, "positive | negative | absolute");
        sub->add_option("--min-pairs", opts.min_pairs, "minimum aligned pairs per day");
        sub->add_option("--clamp-eps", opts.clamp_eps, "clamp distance from |r|=1");
        sub->add_option("--day-offset", opts.day_offset, "day boundary offset in seconds");
        sub->add_option("--phase-pairing", opts.phase_pairing, "site pairs: all | matched");
        sub->add_option("--denominator", opts.denominator, "share denominator: total | valid");
        sub->add_option("--mds-dims", opts.mds_dims, "embedding dimensions");
    }
}

// The worker cap is deliberately absent: outputs (manifests included) must be
// byte-identical for any --threads value.
json config_json(const Config& config)
{
    return {{"tau", config.tau},
            {"sense", to_string(config.sense)},
            {"min_pairs", config.min_pairs},
            {"clamp_eps", config.clamp_eps},
            {"day_offset_seconds", config.day_offset_seconds},
            {"phase_pairing", config.phase_pairing == PhasePairing::all ? "all" : "matched"},
            {"denominator", to_string(config.denominator)},
            {"mds_dims", config.mds_dims}};
}

void write_run_manifest(const std::string& command, const Config& config,
                        const std::vector<std::string>& inputs,
                        const std::vector<std::string>& outputs)
{
    json doc;
    doc["command"] = command;
    doc["config"] = config_json(config);
    json hashes = json::object();
    for (const auto& path : inputs) hashes[path] = "sha256:" + sha256_file(path);
    doc["inputs"] = std::move(hashes);
    // Output names are recorded relative to the output directory so a rerun
    // into a different directory still yields an identical tree.
    json outs = json::array();
    for (const auto& path : outputs)
        outs.push_back(fs::relative(path, config.out_dir).string());
    doc["outputs"] = std::move(outs);
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};

    std::string path = (fs::path(config.out_dir) / ("run-" + command + ".json")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

std::vector<std::string> campaign_inputs(const std::string& data_dir)
{
    std::vector<std::string> inputs = {(fs::path(data_dir) / "measurements.csv").string(),
                                       (fs::path(data_dir) / "manifest.csv").string()};
    std::string params = (fs::path(data_dir) / "parameters.csv").string();
    if (fs::exists(params)) inputs.push_back(params);
    return inputs;
}

StyleMap merged_style(const std::string& data_dir)
{
    StyleMap style;
    style.category_color = {{"110", "#c62828"}, {"220", "#2e7d32"}, {"380", "#1565c0"},
                            {"voltage", "#2e7d32"}, {"current", "#c62828"}};
    auto params = default_parameters();
    if (!data_dir.empty() && fs::exists(fs::path(data_dir) / "parameters.csv"))
        params = load_parameters_csv((fs::path(data_dir) / "parameters.csv").string());
    for (const auto& p : params) style.label_category[p.code] = to_string(p.kind);
    if (!data_dir.empty() && fs::exists(fs::path(data_dir) / "manifest.csv")) {
        for (const auto& s : load_manifest_csv((fs::path(data_dir) / "manifest.csv").string()))
            style.label_category[s.name] = std::to_string(s.voltage_level_kv);
    }
    return style;
}

void write_text(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
}

// Per-site parameter matrices in campaign site order.
std::vector<CorrelationMatrix> all_parameter_matrices(const Campaign& campaign, const Config& config,
                                                      int threads)
{
    std::vector<CorrelationMatrix> matrices;
    matrices.reserve(campaign.sites.size());
    for (const auto& site : campaign.sites)
        matrices.push_back(parameter_matrix(campaign, site.name, config.corr(), threads));
    return matrices;
}

std::string matrix_file(const std::string& out_dir, const CorrelationMatrix& m)
{
    std::string stem = m.mode() == MatrixMode::parameters_at_site ? "params-" : "sites-";
    return (fs::path(out_dir) / (stem + m.context() + ".csv")).string();
}

struct PipelineArtifacts {
    std::vector<std::string> outputs;
};

void cluster_and_embed(const DistanceMatrix& dist, const std::string& prefix, const Config& config,
                       PipelineArtifacts& art, Dendrogram* dend_out = nullptr,
                       Embedding* emb_out = nullptr)
{
    Dendrogram dend = upgma(dist);
    std::string dj = prefix + "-dendrogram.json";
    std::string dn = prefix + "-dendrogram.newick";
    write_dendrogram(dend, dj);
    write_newick(dend, dn);
    art.outputs.push_back(dj);
    art.outputs.push_back(dn);

    int dims = std::min<int>(config.mds_dims, static_cast<int>(dist.size()));
    Embedding emb = classical_mds(dist, dims);
    std::string ec = prefix + "-embedding.csv";
    write_embedding(emb, ec);
    art.outputs.push_back(ec);

    if (dend_out) *dend_out = std::move(dend);
    if (emb_out) *emb_out = std::move(emb);
}

int run_synth(const std::string& spec_path, std::optional<std::uint64_t> seed, std::optional<int> days,
              const CommonOptions& opts)
{
    Config config = opts.resolve();
    SynthSpec spec;
    if (!spec_path.empty()) spec = load_synth_spec(spec_path);
    if (seed) spec.seed = *seed;
    if (days) spec.days = *days;

    Campaign campaign = generate_campaign(spec, opts.threads);
    fs::create_directories(config.out_dir);
    write_campaign_dir(campaign, config.out_dir);
    save_synth_spec(spec, (fs::path(config.out_dir) / "synth-spec.json").string());

    std::vector<std::string> inputs;
    if (!spec_path.empty()) inputs.push_back(spec_path);
    std::vector<std::string> outputs;
    for (const char* name : {"measurements.csv", "manifest.csv", "parameters.csv", "synth-spec.json"})
        outputs.push_back((fs::path(config.out_dir) / name).string());
    write_run_manifest("synth", config, inputs, outputs);
    std::cout << "generated " << campaign.series.size() << " series at " << campaign.sites.size()
              << " sites over " << spec.days << " days\n";
    return 0;
}

int run_validate(const std::string& data_dir, const CommonOptions& opts)
{
    Config config = opts.resolve();
    Campaign campaign = parse_campaign_dir(data_dir);
    ValidationReport report = validate_campaign(campaign);
    fs::create_directories(config.out_dir);
    std::string path = (fs::path(config.out_dir) / "validation.json").string();
    write_validation_report(report, path);
    write_run_manifest("validate", config, campaign_inputs(data_dir), {path});

    double worst = 1.0;
    for (const auto& s : report.series) worst = std::min(worst, s.coverage);
    std::cout << report.series.size() << " series, worst coverage " << format_double(worst)
              << ", grid violations " << report.grid_violations << "\n";
    return 0;
}

int run_correlate_params(const std::string& data_dir, const std::string& site, bool all_sites,
                         const CommonOptions& opts)
{
    if (site.empty() == !all_sites)
        throw UsageError("need exactly one of --site or --all-sites");
    Config config = opts.resolve();
    Campaign campaign = parse_campaign_dir(data_dir);
    fs::create_directories(config.out_dir);

    std::vector<std::string> outputs;
    if (all_sites) {
        for (const auto& m : all_parameter_matrices(campaign, config, opts.threads)) {
            std::string path = matrix_file(config.out_dir, m);
            write_matrix(m, path);
            outputs.push_back(path);
        }
    } else {
        CorrelationMatrix m = parameter_matrix(campaign, site, config.corr(), opts.threads);
        std::string path = matrix_file(config.out_dir, m);
        write_matrix(m, path);
        outputs.push_back(path);
    }
    write_run_manifest("correlate-params", config, campaign_inputs(data_dir), outputs);
    std::cout << "wrote " << outputs.size() << " parameter matrices\n";
    return 0;
}

int run_correlate_sites(const std::string& data_dir, const CommonOptions& opts)
{
    Config config = opts.resolve();
    Campaign campaign = parse_campaign_dir(data_dir);
    fs::create_directories(config.out_dir);

    std::vector<std::string> outputs;
    for (const auto& m : site_matrices(campaign, config.corr(), opts.threads)) {
        std::string path = matrix_file(config.out_dir, m);
        write_matrix(m, path);
        outputs.push_back(path);
    }
    write_run_manifest("correlate-sites", config, campaign_inputs(data_dir), outputs);
    std::cout << "wrote " << outputs.size() << " site matrices\n";
    return 0;
}

std::vector<CorrelationMatrix> read_matrix_set(const std::string& in_dir, const std::string& stem)
{
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        std::string name = entry.path().filename().string();
        if (name.starts_with(stem) && name.ends_with(".csv") && !name.ends_with(".meta.json"))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<CorrelationMatrix> matrices;
    matrices.reserve(files.size());
    for (const auto& f : files) matrices.push_back(read_matrix(f));
    if (matrices.empty()) throw DataError("no '" + stem + "*.csv' matrices found in " + in_dir);
    return matrices;
}

int run_aggregate(const std::string& in_dir, const std::string& mode, const CommonOptions& opts)
{
    Config config = opts.resolve();
    std::string stem = mode == "params" ? "params-" : "sites-";
    auto matrices = read_matrix_set(in_dir, stem);
    AggregationMatrix agg = aggregation_counts(matrices, config.rule());

    fs::create_directories(config.out_dir);
    std::string base = (fs::path(config.out_dir) / ("aggregation-" + mode)).string();
    write_aggregation(agg, base, config.denominator);

    std::vector<std::string> inputs;
    for (const auto& m : matrices) inputs.push_back(matrix_file(in_dir, m));
    write_run_manifest("aggregate", config, inputs,
                       {base + ".counts.csv", base + ".shares.csv", base + ".meta.json"});
    std::cout << "aggregated " << agg.source_count << " matrices (" << mode << ")\n";
    return 0;
}

int run_shares_by_parameter(const std::string& in_dir, const CommonOptions& opts)
{
    Config config = opts.resolve();
    auto matrices = read_matrix_set(in_dir, "sites-");
    auto shares = per_parameter_site_shares(matrices, config.rule());

    fs::create_directories(config.out_dir);
    std::string path = (fs::path(config.out_dir) / "parameter-shares.csv").string();
    write_parameter_shares(shares, config.rule(), path);

    std::vector<std::string> inputs;
    for (const auto& m : matrices) inputs.push_back(matrix_file(in_dir, m));
    write_run_manifest("shares-by-parameter", config, inputs, {path});
    std::cout << "wrote shares for " << shares.size() << " parameters\n";
    return 0;
}

int run_cluster(const std::string& in_path, const std::string& prefix, const CommonOptions& opts)
{
    Config config = opts.resolve();
    DistanceMatrix dist = read_distances(in_path, config.denominator);
    Dendrogram dend = upgma(dist);

    fs::create_directories(config.out_dir);
    std::string dj = (fs::path(config.out_dir) / (prefix + "-dendrogram.json")).string();
    std::string dn = (fs::path(config.out_dir) / (prefix + "-dendrogram.newick")).string();
    write_dendrogram(dend, dj);
    write_newick(dend, dn);
    write_run_manifest("cluster", config, distance_input_files(in_path), {dj, dn});
    std::cout << "clustered " << dist.size() << " items, root height "
              << format_double(dend.merges.back().height) << "\n";
    return 0;
}

int run_embed(const std::string& in_path, const std::string& prefix, const CommonOptions& opts)
{
    Config config = opts.resolve();
    DistanceMatrix dist = read_distances(in_path, config.denominator);
    int dims = std::min<int>(config.mds_dims, static_cast<int>(dist.size()));
    Embedding emb = classical_mds(dist, dims);

    fs::create_directories(config.out_dir);
    std::string path = (fs::path(config.out_dir) / (prefix + "-embedding.csv")).string();
    write_embedding(emb, path);
    write_run_manifest("embed", config, distance_input_files(in_path), {path});
    std::cout << "embedded " << dist.size() << " items, stress " << format_double(emb.stress_value)
              << "\n";
    return 0;
}

int run_plot(const std::string& kind, const std::string& in_path, const std::string& out_file,
             const std::string& data_dir, const std::string& parameter, const std::string& phase,
             const std::vector<std::string>& sites, bool normalize, const CommonOptions& opts)
{
    Config config = opts.resolve();
    StyleMap style = merged_style(data_dir);

    std::string svg;
    std::vector<std::string> inputs;
    if (kind == "heatmap") {
        inputs = distance_input_files(in_path);
        if (inputs.front().ends_with(".counts.csv")) {
            std::string base = inputs.front().substr(0, inputs.front().size() - std::string(".counts.csv").size());
            svg = render_heatmap(heatmap_data(read_aggregation(base), config.denominator), style);
        } else {
            svg = render_heatmap(heatmap_data(read_matrix(in_path)), style);
        }
    } else if (kind == "dendrogram") {
        inputs = {in_path};
        svg = render_dendrogram(read_dendrogram(in_path), style);
    } else if (kind == "scatter") {
        inputs = {in_path};
        svg = render_scatter(read_embedding(in_path), style);
    } else if (kind == "series") {
        if (data_dir.empty() || parameter.empty())
            throw UsageError("plot series needs --data and --parameter");
        Campaign campaign = parse_campaign_dir(data_dir);
        Phase ph = phase_from_string(phase);
        std::vector<SeriesPlotEntry> entries;
        for (const auto& site : campaign.sites) {
            if (!sites.empty() &&
                std::none_of(sites.begin(), sites.end(), [&](const std::string& s) { return s == site.name; }))
                continue;
            const RegularTimeSeries* s = campaign.find({site.name, parameter, ph});
            if (s != nullptr) entries.push_back({site.name, s});
        }
        if (entries.empty()) throw DataError("no series found for parameter '" + parameter + "'");
        inputs = campaign_inputs(data_dir);
        svg = render_series(entries, normalize, style);
    } else {
        throw UsageError("unknown plot kind '" + kind + "'");
    }

    write_text(out_file, svg);
    fs::create_directories(config.out_dir);
    write_run_manifest("plot-" + kind, config, inputs, {out_file});
    std::cout << "wrote " << out_file << "\n";
    return 0;
}

int run_pipeline(const std::string& data_dir, const CommonOptions& opts)
{
    Config config = opts.resolve();
    Campaign campaign = parse_campaign_dir(data_dir);
    fs::create_directories(config.out_dir);
    PipelineArtifacts art;

    ValidationReport report = validate_campaign(campaign);
    std::string vpath = (fs::path(config.out_dir) / "validation.json").string();
    write_validation_report(report, vpath);
    art.outputs.push_back(vpath);

    StyleMap site_style = style_for_sites(campaign);
    StyleMap param_style = style_for_parameters(campaign.parameters);

    // Parameter correlations per site, aggregated across sites.
    auto param_matrices = all_parameter_matrices(campaign, config, opts.threads);
    for (const auto& m : param_matrices) {
        std::string path = matrix_file(config.out_dir, m);
        write_matrix(m, path);
        art.outputs.push_back(path);
    }
    AggregationMatrix param_agg = aggregation_counts(param_matrices, config.rule());
    std::string param_base = (fs::path(config.out_dir) / "aggregation-params").string();
    write_aggregation(param_agg, param_base, config.denominator);

    Dendrogram param_dend;
    Embedding param_emb;
    DistanceMatrix param_dist = to_distance(param_agg, config.denominator);
    cluster_and_embed(param_dist, (fs::path(config.out_dir) / "params").string(), config, art,
                      &param_dend, &param_emb);

    // Site correlations per parameter, aggregated across parameters.
    auto site_mats = site_matrices(campaign, config.corr(), opts.threads);
    for (const auto& m : site_mats) {
        std::string path = matrix_file(config.out_dir, m);
        write_matrix(m, path);
        art.outputs.push_back(path);
    }
    AggregationMatrix site_agg = aggregation_counts(site_mats, config.rule());
    std::string site_base = (fs::path(config.out_dir) / "aggregation-sites").string();
    write_aggregation(site_agg, site_base, config.denominator);

    Dendrogram site_dend;
    Embedding site_emb;
    DistanceMatrix site_dist = to_distance(site_agg, config.denominator);
    cluster_and_embed(site_dist, (fs::path(config.out_dir) / "sites").string(), config, art,
                      &site_dend, &site_emb);

    auto shares = per_parameter_site_shares(site_mats, config.rule());
    std::string shares_path = (fs::path(config.out_dir) / "parameter-shares.csv").string();
    write_parameter_shares(shares, config.rule(), shares_path);
    art.outputs.push_back(shares_path);

    // The five figure exports.
    write_text((fs::path(config.out_dir) / "aggregation-params.svg").string(),
               render_heatmap(heatmap_data(param_agg, config.denominator), param_style));
    write_text((fs::path(config.out_dir) / "params-dendrogram.svg").string(),
               render_dendrogram(param_dend, param_style));
    write_text((fs::path(config.out_dir) / "params-mds.svg").string(),
               render_scatter(param_emb, param_style));
    write_text((fs::path(config.out_dir) / "aggregation-sites.svg").string(),
               render_heatmap(heatmap_data(site_agg, config.denominator), site_style));
    write_text((fs::path(config.out_dir) / "sites-mds.svg").string(),
               render_scatter(site_emb, site_style));
    for (const char* name : {"aggregation-params.svg", "params-dendrogram.svg", "params-mds.svg",
                             "aggregation-sites.svg", "sites-mds.svg"})
        art.outputs.push_back((fs::path(config.out_dir) / name).string());

    write_run_manifest("pipeline", config, campaign_inputs(data_dir), art.outputs);
    std::cout << "pipeline wrote " << art.outputs.size() << " artifacts to " << config.out_dir << "\n";
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args)
{
    CLI::App app{"correlation structure analysis for power quality campaigns", kToolName};
    app.require_subcommand(1);

    CommonOptions opts;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic campaign");
    std::string synth_spec_path;
    std::optional<std::uint64_t> synth_seed;
    std::optional<int> synth_days;
    synth->add_option("--spec", synth_spec_path, "synth spec JSON");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--days", synth_days, "campaign length in days");
    add_common_options(synth, opts, false);

    // validate
    auto* validate = app.add_subcommand("validate", "parse and report campaign health");
    std::string data_dir;
    validate->add_option("--data", data_dir, "campaign directory")->required();
    add_common_options(validate, opts, false);

    // correlate params|sites
    auto* correlate = app.add_subcommand("correlate", "compute mean correlation matrices");
    correlate->require_subcommand(1);
    auto* cparams = correlate->add_subcommand("params", "parameter pairs at sites");
    std::string site;
    bool all_sites = false;
    cparams->add_option("--data", data_dir, "campaign directory")->required();
    cparams->add_option("--site", site, "single site");
    cparams->add_flag("--all-sites", all_sites, "every site in the campaign");
    add_common_options(cparams, opts);
    auto* csites = correlate->add_subcommand("sites", "site pairs per parameter");
    csites->add_option("--data", data_dir, "campaign directory")->required();
    add_common_options(csites, opts);

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "threshold counts across matrices");
    std::string in_dir;
    std::string agg_mode = "params";
    aggregate->add_option("--in", in_dir, "directory with correlate outputs")->required();
    aggregate->add_option("--mode", agg_mode, "params | sites")
        ->check(CLI::IsMember({"params", "sites"}));
    add_common_options(aggregate, opts);

    // shares-by-parameter
    auto* shares = app.add_subcommand("shares-by-parameter", "share of significant site pairs");
    shares->add_option("--in", in_dir, "directory with correlate sites outputs")->required();
    add_common_options(shares, opts);

    // cluster / embed
    auto* cluster = app.add_subcommand("cluster", "average-linkage dendrogram");
    std::string in_path;
    std::string cluster_prefix = "cluster";
    std::string embed_prefix = "embed";
    cluster->add_option("--in", in_path, "matrix csv or aggregation base path")->required();
    cluster->add_option("--prefix", cluster_prefix, "output file prefix");
    add_common_options(cluster, opts);
    auto* embed = app.add_subcommand("embed", "classical MDS embedding");
    embed->add_option("--in", in_path, "matrix csv or aggregation base path")->required();
    embed->add_option("--prefix", embed_prefix, "output file prefix");
    add_common_options(embed, opts);

    // plot
    auto* plot = app.add_subcommand("plot", "render an artifact as SVG");
    std::string plot_kind, plot_out, plot_parameter, plot_phase = "L1";
    std::vector<std::string> plot_sites;
    bool plot_normalize = false;
    plot->add_option("kind", plot_kind, "heatmap | dendrogram | scatter | series")->required();
    plot->add_option("--in", in_path, "artifact to render");
    plot->add_option("--file", plot_out, "output SVG path")->required();
    plot->add_option("--data", data_dir, "campaign directory (styling / series data)");
    plot->add_option("--parameter", plot_parameter, "parameter for series plots");
    plot->add_option("--phase", plot_phase, "phase for series plots");
    plot->add_option("--sites", plot_sites, "restrict series plot to these sites")->delimiter(',');
    plot->add_flag("--normalize", plot_normalize, "min-max normalize each series");
    add_common_options(plot, opts, false);

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "full analysis end to end");
    pipeline->add_option("--data", data_dir, "campaign directory")->required();
    add_common_options(pipeline, opts);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));

        if (synth->parsed()) return run_synth(synth_spec_path, synth_seed, synth_days, opts);
        if (validate->parsed()) return run_validate(data_dir, opts);
        if (correlate->parsed()) {
            if (cparams->parsed()) return run_correlate_params(data_dir, site, all_sites, opts);
            return run_correlate_sites(data_dir, opts);
        }
        if (aggregate->parsed()) return run_aggregate(in_dir, agg_mode, opts);
        if (shares->parsed()) return run_shares_by_parameter(in_dir, opts);
        if (cluster->parsed()) return run_cluster(in_path, cluster_prefix, opts);
        if (embed->parsed()) return run_embed(in_path, embed_prefix, opts);
        if (plot->parsed())
            return run_plot(plot_kind, in_path, plot_out, data_dir, plot_parameter, plot_phase,
                            plot_sites, plot_normalize, opts);
        if (pipeline->parsed()) return run_pipeline(data_dir, opts);
        throw UsageError("no subcommand given");
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << kToolName << ": numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": " << e.what() << "\n";
        return 2;
    }
}

}  // namespace pqcorr
