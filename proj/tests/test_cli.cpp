#include <doctest.h>

#include <filesystem>
#include <map>

#include "oracles.hpp"
#include "pqcorr/cli.hpp"
#include "pqcorr/io.hpp"
#include "pqcorr/synth.hpp"
#include "pqcorr/timeutil.hpp"
#include "testutil.hpp"

using namespace pqcorr;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<std::string> args) { return dispatch(std::vector<std::string>(args)); }

// Small campaign with one planted two-site group, written to disk.
void make_data(const std::string& dir, std::uint64_t seed = 3)
{
    SynthSpec spec;
    spec.sites_110 = 3;
    spec.sites_220 = 1;
    spec.sites_380 = 0;
    spec.days = 4;
    spec.seed = seed;
    spec.parameters.clear();
    for (const auto& p : default_parameters())
        if (p.code == "Urms" || p.code == "UNB" || p.code == "U05" || p.code == "Uthd" ||
            p.code == "I03")
            spec.parameters.push_back(p);
    spec.groups.push_back({{"S110-01", "S110-02"}, {"U05", "Uthd"}, 0.2, 0.0});
    write_campaign_dir(generate_campaign(spec), dir);
}

std::map<std::string, std::string> snapshot_tree(const std::string& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file())
            files[fs::relative(entry.path(), dir).string()] = testutil::read_file(entry.path().string());
    }
    return files;
}

}  // namespace

TEST_CASE("usage errors exit with code 1")
{
    CHECK(run({}) == 1);
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({"validate"}) == 1);                       // missing --data
    CHECK(run({"synth", "--bogus-flag", "x"}) == 1);     // unknown flag
    CHECK(run({"correlate", "params", "--data", "x"}) == 1);  // neither --site nor --all-sites
}

TEST_CASE("data errors exit with code 2")
{
    testutil::TempDir dir("cli-missing");
    CHECK(run({"validate", "--data", dir.file("nope"), "--out", dir.file("out")}) == 2);

    testutil::write_file(dir.file("measurements.csv"), "timestamp,site,parameter,phase,value\nbad\n");
    testutil::write_file(dir.file("manifest.csv"), "site,voltage_level,substation\nA,110,s\n");
    CHECK(run({"validate", "--data", dir.str(), "--out", dir.file("out")}) == 2);
}

TEST_CASE("config violations exit with code 1")
{
    testutil::TempDir dir("cli-cfg");
    testutil::write_file(dir.file("bad.cfg"), "tau = 1.5\n");
    make_data(dir.file("data"));
    CHECK(run({"pipeline", "--data", dir.file("data"), "--config", dir.file("bad.cfg"), "--out",
               dir.file("out")}) == 1);
    CHECK(run({"pipeline", "--data", dir.file("data"), "--tau", "0", "--out", dir.file("out")}) == 1);
}

TEST_CASE("synth then validate round trip through the CLI")
{
    testutil::TempDir dir("cli-synth");
    SynthSpec spec;
    spec.sites_110 = 2;
    spec.sites_220 = 0;
    spec.sites_380 = 0;
    spec.days = 2;
    spec.parameters = {default_parameters()[2]};
    save_synth_spec(spec, dir.file("spec.json"));

    CHECK(run({"synth", "--spec", dir.file("spec.json"), "--seed", "9", "--out", dir.file("data")}) == 0);
    CHECK(fs::exists(dir.file("data/measurements.csv")));
    CHECK(fs::exists(dir.file("data/manifest.csv")));
    CHECK(fs::exists(dir.file("data/parameters.csv")));
    CHECK(fs::exists(dir.file("data/run-synth.json")));

    CHECK(run({"validate", "--data", dir.file("data"), "--out", dir.file("out")}) == 0);
    CHECK(fs::exists(dir.file("out/validation.json")));
}

TEST_CASE("pipeline produces the full artifact inventory")
{
    testutil::TempDir dir("cli-pipe");
    make_data(dir.file("data"));
    CHECK(run({"pipeline", "--data", dir.file("data"), "--out", dir.file("out"), "--threads", "2"}) == 0);

    // Matrices, aggregation, dendrogram JSON, embedding CSV, and 5 SVGs.
    for (const char* name :
         {"validation.json", "params-S110-01.csv", "params-S220-01.csv", "sites-U05.csv",
          "aggregation-params.counts.csv", "aggregation-params.shares.csv",
          "aggregation-params.meta.json", "aggregation-sites.counts.csv", "params-dendrogram.json",
          "params-dendrogram.newick", "params-embedding.csv", "sites-dendrogram.json",
          "sites-embedding.csv", "parameter-shares.csv", "run-pipeline.json"})
        CHECK_MESSAGE(fs::exists(dir.file(std::string("out/") + name)), name);

    std::size_t svg_count = 0;
    for (const auto& entry : fs::directory_iterator(dir.file("out")))
        if (entry.path().extension() == ".svg") ++svg_count;
    CHECK(svg_count == 5);

    // Planted pair shows up in the per-site parameter matrix.
    auto m = read_matrix(dir.file("out/params-S110-01.csv"));
    std::size_t i_u05 = 0, i_uthd = 0;
    for (std::size_t i = 0; i < m.labels().size(); ++i) {
        if (m.labels()[i] == "U05") i_u05 = i;
        if (m.labels()[i] == "Uthd") i_uthd = i;
    }
    REQUIRE(m.at(i_u05, i_uthd).has_value());
    CHECK(*m.at(i_u05, i_uthd) > 0.7);

    // Every SVG is well-formed XML.
    for (const auto& entry : fs::directory_iterator(dir.file("out"))) {
        if (entry.path().extension() != ".svg") continue;
        std::string err;
        CHECK_MESSAGE(oracle::xml_well_formed(testutil::read_file(entry.path().string()), &err),
                      entry.path().string() << ": " << err);
    }
}

TEST_CASE("pipeline reruns are byte-identical")
{
    testutil::TempDir dir("cli-det");
    make_data(dir.file("data"));
    REQUIRE(run({"pipeline", "--data", dir.file("data"), "--out", dir.file("o1"), "--threads", "1"}) == 0);
    REQUIRE(run({"pipeline", "--data", dir.file("data"), "--out", dir.file("o2"), "--threads", "2"}) == 0);

    auto t1 = snapshot_tree(dir.file("o1"));
    auto t2 = snapshot_tree(dir.file("o2"));
    REQUIRE(t1.size() == t2.size());
    for (const auto& [name, content] : t1) {
        REQUIRE(t2.contains(name));
        CHECK_MESSAGE(t2.at(name) == content, "artifact differs: " << name);
    }
}

TEST_CASE("aggregate tau monotonicity holds at the CLI level")
{
    testutil::TempDir dir("cli-agg");
    make_data(dir.file("data"));
    REQUIRE(run({"correlate", "params", "--data", dir.file("data"), "--all-sites", "--out",
                 dir.file("mats")}) == 0);
    REQUIRE(run({"aggregate", "--in", dir.file("mats"), "--mode", "params", "--tau", "0.7", "--out",
                 dir.file("a07")}) == 0);
    REQUIRE(run({"aggregate", "--in", dir.file("mats"), "--mode", "params", "--tau", "0.9", "--out",
                 dir.file("a09")}) == 0);

    auto lo = read_aggregation(dir.file("a07/aggregation-params"));
    auto hi = read_aggregation(dir.file("a09/aggregation-params"));
    REQUIRE(lo.counts.size() == hi.counts.size());
    for (std::size_t k = 0; k < lo.counts.size(); ++k) CHECK(hi.counts[k] <= lo.counts[k]);
}

TEST_CASE("cluster, embed and plot consume exported artifacts")
{
    testutil::TempDir dir("cli-chain");
    make_data(dir.file("data"));
    REQUIRE(run({"correlate", "sites", "--data", dir.file("data"), "--out", dir.file("mats")}) == 0);
    REQUIRE(run({"aggregate", "--in", dir.file("mats"), "--mode", "sites", "--out", dir.file("agg")}) == 0);
    REQUIRE(run({"shares-by-parameter", "--in", dir.file("mats"), "--out", dir.file("agg")}) == 0);
    REQUIRE(run({"cluster", "--in", dir.file("agg/aggregation-sites"), "--prefix", "sites", "--out",
                 dir.file("structs")}) == 0);
    REQUIRE(run({"embed", "--in", dir.file("agg/aggregation-sites"), "--prefix", "sites", "--out",
                 dir.file("structs")}) == 0);
    CHECK(fs::exists(dir.file("structs/sites-dendrogram.json")));
    CHECK(fs::exists(dir.file("structs/sites-dendrogram.newick")));
    CHECK(fs::exists(dir.file("structs/sites-embedding.csv")));

    REQUIRE(run({"plot", "heatmap", "--in", dir.file("agg/aggregation-sites.shares.csv"), "--file",
                 dir.file("h.svg"), "--data", dir.file("data"), "--out", dir.file("plots")}) == 0);
    REQUIRE(run({"plot", "dendrogram", "--in", dir.file("structs/sites-dendrogram.json"), "--file",
                 dir.file("d.svg"), "--data", dir.file("data"), "--out", dir.file("plots")}) == 0);
    REQUIRE(run({"plot", "scatter", "--in", dir.file("structs/sites-embedding.csv"), "--file",
                 dir.file("s.svg"), "--data", dir.file("data"), "--out", dir.file("plots")}) == 0);
    REQUIRE(run({"plot", "series", "--data", dir.file("data"), "--parameter", "U05", "--normalize",
                 "--file", dir.file("t.svg"), "--out", dir.file("plots")}) == 0);

    for (const char* name : {"h.svg", "d.svg", "s.svg", "t.svg"}) {
        std::string err;
        auto svg = testutil::read_file(dir.file(name));
        CHECK_MESSAGE(oracle::xml_well_formed(svg, &err), name << ": " << err);
    }
    // Four sites, one series per site for parameter U05 per phase filter.
    auto overlay = testutil::read_file(dir.file("t.svg"));
    CHECK(oracle::count_occurrences(overlay, "class=\"series\"") == 4);
}

TEST_CASE("single-site correlate writes one matrix")
{
    testutil::TempDir dir("cli-one");
    make_data(dir.file("data"));
    CHECK(run({"correlate", "params", "--data", dir.file("data"), "--site", "S110-01", "--out",
               dir.file("m")}) == 0);
    CHECK(fs::exists(dir.file("m/params-S110-01.csv")));
    CHECK(fs::exists(dir.file("m/params-S110-01.csv.meta.json")));
    CHECK(fs::exists(dir.file("m/run-correlate-params.json")));
    CHECK(run({"correlate", "params", "--data", dir.file("data"), "--site", "NOPE", "--out",
               dir.file("m")}) == 2);
}
