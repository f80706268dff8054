#pragma once

#include <string>
#include <vector>

#include "pqcorr/aggregate.hpp"
#include "pqcorr/ingest.hpp"
#include "pqcorr/rankcorr.hpp"
#include "pqcorr/structure.hpp"

namespace pqcorr {

// Correlation matrix: CSV with a label header row/column, empty cell = absent,
// plus a <path>.meta.json sidecar (mode, context, period, per-entry day counts).
void write_matrix(const CorrelationMatrix& matrix, const std::string& csv_path);
CorrelationMatrix read_matrix(const std::string& csv_path);

// Aggregation: <base>.counts.csv, <base>.shares.csv and <base>.meta.json
// (tau, sense, M, denominator).
void write_aggregation(const AggregationMatrix& agg, const std::string& base_path,
                       ShareDenominator denominator = ShareDenominator::total);
AggregationMatrix read_aggregation(const std::string& base_path);

void write_dendrogram(const Dendrogram& dendrogram, const std::string& json_path);
Dendrogram read_dendrogram(const std::string& json_path);

std::string to_newick(const Dendrogram& dendrogram);
void write_newick(const Dendrogram& dendrogram, const std::string& path);

// Embedding: CSV `label,x,y,...` plus sidecar (eigenvalues, stress, flag).
void write_embedding(const Embedding& embedding, const std::string& csv_path);
Embedding read_embedding(const std::string& csv_path);

void write_parameter_shares(const std::vector<ParameterShare>& shares, const ThresholdRule& rule,
                            const std::string& csv_path);

void write_validation_report(const ValidationReport& report, const std::string& json_path);

// True when the path carries an aggregation sidecar (i.e. was written by
// write_aggregation) rather than a correlation matrix.
bool is_aggregation_artifact(const std::string& path);

// Reads either artifact kind into a distance matrix for clustering/embedding.
DistanceMatrix read_distances(const std::string& path,
                              ShareDenominator denominator = ShareDenominator::total);

// The files read_distances would touch for the given path (for run manifests).
std::vector<std::string> distance_input_files(const std::string& path);

std::string sha256_file(const std::string& path);

}  // namespace pqcorr
