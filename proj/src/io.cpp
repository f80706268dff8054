#include "pqcorr/io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "pqcorr/errors.hpp"
#include "pqcorr/timeutil.hpp"

namespace pqcorr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

json load_json(const std::string& path)
{
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

void dump_json(const json& doc, const std::string& path)
{
    auto out = open_out(path);
    out << doc.dump(2) << "\n";
}

std::string meta_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

void split_line(const std::string& line, std::vector<std::string>& fields)
{
    fields.clear();
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// Shared layout for the labelled square CSVs (correlations, counts, shares).
template <typename Cell>
void write_labelled_square(std::ofstream& out, const std::vector<std::string>& labels, Cell cell)
{
    const std::size_t n = labels.size();
    for (const auto& label : labels) out << ',' << label;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << labels[i];
        for (std::size_t j = 0; j < n; ++j) {
            out << ',';
            cell(out, i, j);
        }
        out << '\n';
    }
}

struct SquareCsv {
    std::vector<std::string> labels;
    std::vector<std::string> cells;  // row-major, raw text
};

SquareCsv read_labelled_square(const std::string& path)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    SquareCsv csv;
    std::vector<std::string> fields;
    split_line(line, fields);
    if (fields.size() < 2 || !fields[0].empty())
        throw DataError(path + ": expected a label header starting with an empty cell");
    csv.labels.assign(fields.begin() + 1, fields.end());

    const std::size_t n = csv.labels.size();
    csv.cells.reserve(n * n);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_line(line, fields);
        if (fields.size() != n + 1) throw DataError(path + ": row width mismatch");
        if (row >= n) throw DataError(path + ": more rows than labels");
        if (fields[0] != csv.labels[row]) throw DataError(path + ": row label mismatch");
        for (std::size_t j = 0; j < n; ++j) csv.cells.push_back(fields[j + 1]);
        ++row;
    }
    if (row != n) throw DataError(path + ": fewer rows than labels");
    return csv;
}

}  // namespace

void write_matrix(const CorrelationMatrix& matrix, const std::string& csv_path)
{
    auto out = open_out(csv_path);
    write_labelled_square(out, matrix.labels(), [&matrix](std::ofstream& o, std::size_t i, std::size_t j) {
        auto r = matrix.at(i, j);
        if (r) o << format_double(*r);
    });

    const std::size_t n = matrix.size();
    json days = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) row.push_back(matrix.day_count(i, j));
        days.push_back(std::move(row));
    }
    dump_json(json{{"mode", to_string(matrix.mode())},
                   {"context", matrix.context()},
                   {"period", {{"begin", format_iso8601_utc(matrix.period_begin)},
                               {"end", format_iso8601_utc(matrix.period_end)}}},
                   {"day_counts", std::move(days)}},
              meta_path(csv_path));
}

CorrelationMatrix read_matrix(const std::string& csv_path)
{
    SquareCsv csv = read_labelled_square(csv_path);

    MatrixMode mode = MatrixMode::parameters_at_site;
    std::string context;
    std::int64_t begin = 0, end = 0;
    std::vector<int> day_counts;
    if (fs::exists(meta_path(csv_path))) {
        json meta = load_json(meta_path(csv_path));
        mode = matrix_mode_from_string(meta.at("mode").get<std::string>());
        context = meta.value("context", "");
        if (meta.contains("period")) {
            begin = parse_iso8601_utc(meta["period"].at("begin").get<std::string>());
            end = parse_iso8601_utc(meta["period"].at("end").get<std::string>());
        }
        if (meta.contains("day_counts")) {
            for (const auto& row : meta["day_counts"])
                for (const auto& v : row) day_counts.push_back(v.get<int>());
        }
    }

    CorrelationMatrix matrix(mode, context, csv.labels);
    matrix.period_begin = begin;
    matrix.period_end = end;
    const std::size_t n = csv.labels.size();
    if (!day_counts.empty() && day_counts.size() != n * n)
        throw DataError(csv_path + ": day_counts shape mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const std::string& cell = csv.cells[i * n + j];
            const std::string& mirror = csv.cells[j * n + i];
            if (cell != mirror) throw DataError(csv_path + ": matrix is not symmetric");
            int days = day_counts.empty() ? 0 : day_counts[i * n + j];
            if (cell.empty())
                matrix.set(i, j, std::nullopt, days);
            else
                matrix.set(i, j, parse_double(cell), days);
        }
    }
    return matrix;
}

void write_aggregation(const AggregationMatrix& agg, const std::string& base_path,
                       ShareDenominator denominator)
{
    {
        auto out = open_out(base_path + ".counts.csv");
        write_labelled_square(out, agg.labels, [&agg](std::ofstream& o, std::size_t i, std::size_t j) {
            o << agg.count(i, j);
        });
    }
    {
        auto out = open_out(base_path + ".shares.csv");
        write_labelled_square(out, agg.labels,
                              [&agg, denominator](std::ofstream& o, std::size_t i, std::size_t j) {
                                  o << format_double(agg.share(i, j, denominator));
                              });
    }
    const std::size_t n = agg.size();
    json valid = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) row.push_back(agg.valid[i * n + j]);
        valid.push_back(std::move(row));
    }
    dump_json(json{{"tau", agg.rule.tau},
                   {"sense", to_string(agg.rule.sense)},
                   {"matrices", agg.source_count},
                   {"denominator", to_string(denominator)},
                   {"valid_counts", std::move(valid)}},
              base_path + ".meta.json");
}

AggregationMatrix read_aggregation(const std::string& base_path)
{
    SquareCsv csv = read_labelled_square(base_path + ".counts.csv");
    json meta = load_json(base_path + ".meta.json");

    AggregationMatrix agg;
    agg.labels = csv.labels;
    agg.rule.tau = meta.at("tau").get<double>();
    agg.rule.sense = sense_from_string(meta.at("sense").get<std::string>());
    agg.source_count = meta.at("matrices").get<int>();
    const std::size_t n = csv.labels.size();
    agg.counts.reserve(n * n);
    for (const auto& cell : csv.cells) agg.counts.push_back(static_cast<int>(parse_double(cell)));
    agg.valid.assign(n * n, agg.source_count);
    if (meta.contains("valid_counts")) {
        agg.valid.clear();
        for (const auto& row : meta["valid_counts"])
            for (const auto& v : row) agg.valid.push_back(v.get<int>());
        if (agg.valid.size() != n * n) throw DataError(base_path + ": valid_counts shape mismatch");
    }
    return agg;
}

void write_dendrogram(const Dendrogram& dendrogram, const std::string& json_path)
{
    json merges = json::array();
    for (const auto& m : dendrogram.merges)
        merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
    dump_json(json{{"labels", dendrogram.labels}, {"merges", std::move(merges)}}, json_path);
}

Dendrogram read_dendrogram(const std::string& json_path)
{
    json doc = load_json(json_path);
    Dendrogram d;
    d.labels = doc.at("labels").get<std::vector<std::string>>();
    for (const auto& m : doc.at("merges")) {
        d.merges.push_back({m.at("a").get<int>(), m.at("b").get<int>(), m.at("height").get<double>(),
                            m.at("size").get<int>()});
    }
    if (d.merges.size() + 1 != d.labels.size()) throw DataError(json_path + ": merge count mismatch");
    return d;
}

std::string to_newick(const Dendrogram& dendrogram)
{
    const int n = static_cast<int>(dendrogram.leaf_count());
    // Branch length = parent height - child height (leaves sit at height 0).
    std::function<void(std::ostringstream&, int, double)> emit = [&](std::ostringstream& os, int node,
                                                                     double parent_height) {
        if (node < n) {
            os << dendrogram.labels[static_cast<std::size_t>(node)] << ':'
               << format_double(parent_height);
            return;
        }
        const Merge& m = dendrogram.merges[static_cast<std::size_t>(node - n)];
        os << '(';
        emit(os, m.a, m.height);
        os << ',';
        emit(os, m.b, m.height);
        os << "):" << format_double(parent_height - m.height);
    };

    std::ostringstream os;
    if (dendrogram.merges.empty()) {
        os << (dendrogram.labels.empty() ? "" : dendrogram.labels[0]) << ";";
        return os.str();
    }
    const Merge& root = dendrogram.merges.back();
    os << '(';
    emit(os, root.a, root.height);
    os << ',';
    emit(os, root.b, root.height);
    os << ");";
    return os.str();
}

void write_newick(const Dendrogram& dendrogram, const std::string& path)
{
    auto out = open_out(path);
    out << to_newick(dendrogram) << "\n";
}

void write_embedding(const Embedding& embedding, const std::string& csv_path)
{
    auto out = open_out(csv_path);
    out << "label";
    for (int a = 0; a < embedding.dims; ++a) out << ",x" << a + 1;
    out << '\n';
    for (std::size_t i = 0; i < embedding.labels.size(); ++i) {
        out << embedding.labels[i];
        for (int a = 0; a < embedding.dims; ++a) out << ',' << format_double(embedding.coord(i, a));
        out << '\n';
    }
    dump_json(json{{"eigenvalues", embedding.eigenvalues},
                   {"stress", embedding.stress_value},
                   {"negative_eigenvalues", embedding.negative_eigenvalues}},
              meta_path(csv_path));
}

Embedding read_embedding(const std::string& csv_path)
{
    auto in = open_in(csv_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(csv_path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    split_line(line, fields);
    if (fields.size() < 2 || fields[0] != "label") throw DataError(csv_path + ": bad embedding header");

    Embedding emb;
    emb.dims = static_cast<int>(fields.size() - 1);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_line(line, fields);
        if (fields.size() != static_cast<std::size_t>(emb.dims) + 1)
            throw DataError(csv_path + ": row width mismatch");
        emb.labels.push_back(fields[0]);
        for (int a = 0; a < emb.dims; ++a) emb.coordinates.push_back(parse_double(fields[a + 1]));
    }
    if (fs::exists(meta_path(csv_path))) {
        json meta = load_json(meta_path(csv_path));
        emb.eigenvalues = meta.value("eigenvalues", std::vector<double>{});
        emb.stress_value = meta.value("stress", 0.0);
        emb.negative_eigenvalues = meta.value("negative_eigenvalues", false);
    }
    return emb;
}

void write_parameter_shares(const std::vector<ParameterShare>& shares, const ThresholdRule& rule,
                            const std::string& csv_path)
{
    auto out = open_out(csv_path);
    out << "parameter,significant_pairs,total_pairs,share\n";
    for (const auto& s : shares) {
        out << s.parameter << ',' << s.significant_pairs << ',' << s.total_pairs << ','
            << format_double(s.share()) << '\n';
    }
    dump_json(json{{"tau", rule.tau},
                   {"sense", to_string(rule.sense)},
                   {"pair_convention", "distinct unordered site pairs"}},
              meta_path(csv_path));
}

void write_validation_report(const ValidationReport& report, const std::string& json_path)
{
    json series = json::array();
    for (const auto& s : report.series) {
        series.push_back({{"site", s.key.site},
                          {"parameter", s.key.parameter},
                          {"phase", to_string(s.key.phase)},
                          {"length", s.length},
                          {"present", s.present},
                          {"coverage", s.coverage},
                          {"gap_count", s.gap_count},
                          {"max_gap", s.max_gap},
                          {"grid_aligned", s.grid_aligned}});
    }
    dump_json(json{{"series", std::move(series)},
                   {"grid_violations", report.grid_violations},
                   {"duplicate_records", report.duplicate_records}},
              json_path);
}

bool is_aggregation_artifact(const std::string& path)
{
    if (fs::exists(path + ".meta.json")) {
        json meta = load_json(path + ".meta.json");
        if (meta.contains("tau")) return true;
    }
    return fs::exists(path + ".counts.csv");
}

namespace {

// Accept the counts/shares/meta file itself as the aggregation handle.
std::string strip_aggregation_suffix(const std::string& path)
{
    std::string base = path;
    for (const char* suffix : {".counts.csv", ".shares.csv", ".meta.json"}) {
        if (base.size() > std::strlen(suffix) && base.ends_with(suffix)) {
            base.resize(base.size() - std::strlen(suffix));
            break;
        }
    }
    return base;
}

}  // namespace

DistanceMatrix read_distances(const std::string& path, ShareDenominator denominator)
{
    std::string base = strip_aggregation_suffix(path);
    if (is_aggregation_artifact(base)) return to_distance(read_aggregation(base), denominator);
    return to_distance(read_matrix(path));
}

std::vector<std::string> distance_input_files(const std::string& path)
{
    std::string base = strip_aggregation_suffix(path);
    if (is_aggregation_artifact(base)) return {base + ".counts.csv", base + ".meta.json"};
    std::vector<std::string> files{path};
    if (fs::exists(path + ".meta.json")) files.push_back(path + ".meta.json");
    return files;
}

std::string sha256_file(const std::string& path)
{
    auto in = open_in(path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw NumericError("cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        std::streamsize got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace pqcorr
