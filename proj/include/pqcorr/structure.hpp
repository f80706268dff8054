#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqcorr/aggregate.hpp"
#include "pqcorr/rankcorr.hpp"

namespace pqcorr {

struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<double> d;      // row-major, symmetric, zero diagonal
    int defaulted_entries = 0;  // absent inputs mapped to the maximal distance 1

    std::size_t size() const { return labels.size(); }
    double at(std::size_t i, std::size_t j) const { return d[i * size() + j]; }
};

// D = 1 - A off the diagonal, 0 on it. Correlation input may produce distances
// up to 2; absent coefficients become distance 1 and are counted.
DistanceMatrix to_distance(const CorrelationMatrix& matrix);
DistanceMatrix to_distance(const AggregationMatrix& matrix,
                           ShareDenominator denominator = ShareDenominator::total);

// Merge record in the usual linkage convention: leaves are nodes 0..n-1, the
// t-th merge creates node n+t. `a` is the subtree holding the smaller leaf index.
struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
    int size = 0;
};

struct Dendrogram {
    std::vector<std::string> labels;
    std::vector<Merge> merges;

    std::size_t leaf_count() const { return labels.size(); }
    // Leaves in drawing order: depth-first, `a` subtree before `b`.
    std::vector<int> leaf_order() const;
};

// Average-linkage agglomerative clustering; heights are the average
// inter-cluster distances and never decrease along the merge sequence. Ties
// pick the pair with the smallest (left, right) label indices.
Dendrogram upgma(const DistanceMatrix& distances);

// Partition into k clusters by undoing the last k-1 merges; cluster ids are
// assigned 0..k-1 in order of first occurrence over the leaves.
std::vector<int> cut(const Dendrogram& dendrogram, int k);

struct Embedding {
    std::vector<std::string> labels;
    int dims = 0;
    std::vector<double> coordinates;  // row-major, leaf_count x dims
    std::vector<double> eigenvalues;  // top `dims` eigenvalues, nonincreasing
    double stress_value = 0.0;
    bool negative_eigenvalues = false;

    double coord(std::size_t i, int axis) const { return coordinates[i * dims + axis]; }
};

// Torgerson's classical scaling: eigendecompose the double-centered squared
// distances and scale the top-k eigenvectors by sqrt(eigenvalue). Axes whose
// eigenvalue is non-positive are zero-filled; negative ones also set a flag.
// Each axis is flipped so its largest-magnitude coordinate is positive.
Embedding classical_mds(const DistanceMatrix& distances, int k = 2);

// Normalized residual between the input distances and the embedded Euclidean
// distances: sqrt(sum (d - dhat)^2 / sum d^2) over distinct pairs.
double stress(const DistanceMatrix& distances, const Embedding& embedding);

}  // namespace pqcorr
