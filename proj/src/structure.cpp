#include "pqcorr/structure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pqcorr/errors.hpp"

namespace pqcorr {

namespace {

DistanceMatrix distance_from_values(const std::vector<std::string>& labels,
                                    const std::vector<std::optional<double>>& values)
{
    const std::size_t n = labels.size();
    DistanceMatrix dist;
    dist.labels = labels;
    dist.d.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& a = values[i * n + j];
            if (!a) {
                dist.d[i * n + j] = 1.0;
                ++dist.defaulted_entries;
                continue;
            }
            if (*a > 1.0 + 1e-12) throw DataError("distance transform input exceeds 1");
            dist.d[i * n + j] = 1.0 - std::min(*a, 1.0);
        }
    }
    return dist;
}

}  // namespace

DistanceMatrix to_distance(const CorrelationMatrix& matrix)
{
    const std::size_t n = matrix.size();
    std::vector<std::optional<double>> values(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) values[i * n + j] = matrix.at(i, j);
    return distance_from_values(matrix.labels(), values);
}

DistanceMatrix to_distance(const AggregationMatrix& matrix, ShareDenominator denominator)
{
    const std::size_t n = matrix.size();
    std::vector<std::optional<double>> values(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) values[i * n + j] = matrix.share(i, j, denominator);
    return distance_from_values(matrix.labels, values);
}

Dendrogram upgma(const DistanceMatrix& distances)
{
    const std::size_t n = distances.size();
    if (n < 2) throw std::invalid_argument("clustering needs at least two items");

    // Active clusters keep the slot of their smallest leaf; scanning slots in
    // ascending order resolves ties toward the smallest (left, right) pair.
    std::vector<double> work(distances.d);
    std::vector<bool> active(n, true);
    std::vector<int> node_id(n);
    std::vector<int> cluster_size(n, 1);
    for (std::size_t i = 0; i < n; ++i) node_id[i] = static_cast<int>(i);

    Dendrogram out;
    out.labels = distances.labels;
    out.merges.reserve(n - 1);

    double last_height = -std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_i = 0, best_j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                double d = work[i * n + j];
                if (d < best) {
                    best = d;
                    best_i = i;
                    best_j = j;
                }
            }
        }

        Merge merge;
        merge.a = node_id[best_i];
        merge.b = node_id[best_j];
        merge.height = best;
        merge.size = cluster_size[best_i] + cluster_size[best_j];
        if (merge.height < last_height)
            throw NumericError("average-linkage heights decreased");
        last_height = merge.height;
        out.merges.push_back(merge);

        // Size-weighted average of the two old distances; rounding could dip a
        // hair below the current height, which would break monotonicity, so
        // clamp to it.
        const double wi = cluster_size[best_i];
        const double wj = cluster_size[best_j];
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_i || k == best_j) continue;
            double d = (wi * work[best_i * n + k] + wj * work[best_j * n + k]) / (wi + wj);
            d = std::max(d, best);
            work[best_i * n + k] = d;
            work[k * n + best_i] = d;
        }
        node_id[best_i] = static_cast<int>(n + step);
        cluster_size[best_i] += cluster_size[best_j];
        active[best_j] = false;
    }
    return out;
}

std::vector<int> Dendrogram::leaf_order() const
{
    const int n = static_cast<int>(labels.size());
    std::vector<int> order;
    order.reserve(labels.size());
    if (merges.empty()) {
        for (int i = 0; i < n; ++i) order.push_back(i);
        return order;
    }
    std::vector<int> stack{n + static_cast<int>(merges.size()) - 1};
    while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        if (node < n) {
            order.push_back(node);
            continue;
        }
        const Merge& m = merges[static_cast<std::size_t>(node - n)];
        stack.push_back(m.b);
        stack.push_back(m.a);
    }
    return order;
}

std::vector<int> cut(const Dendrogram& dendrogram, int k)
{
    const int n = static_cast<int>(dendrogram.leaf_count());
    if (k < 1 || k > n) throw std::invalid_argument("cluster count must lie in [1, n]");

    // Apply the first n-k merges with a union-find over leaves.
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&parent](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::vector<int> node_root(n + dendrogram.merges.size());
    for (int i = 0; i < n; ++i) node_root[static_cast<std::size_t>(i)] = i;
    for (int t = 0; t < n - k; ++t) {
        const Merge& m = dendrogram.merges[static_cast<std::size_t>(t)];
        int ra = find(node_root[static_cast<std::size_t>(m.a)]);
        int rb = find(node_root[static_cast<std::size_t>(m.b)]);
        parent[rb] = ra;
        node_root[static_cast<std::size_t>(n + t)] = ra;
    }

    std::vector<int> label(n, -1);
    std::vector<int> root_label(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        label[static_cast<std::size_t>(i)] = root_label[r];
    }
    return label;
}

Embedding classical_mds(const DistanceMatrix& distances, int k)
{
    const std::size_t n = distances.size();
    if (n < 2) throw std::invalid_argument("embedding needs at least two items");
    if (k < 1 || k > static_cast<int>(n)) throw std::invalid_argument("embedding dimension out of range");

    Eigen::MatrixXd sq(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sq(i, j) = distances.at(i, j) * distances.at(i, j);

    // B = -1/2 J sq J via direct row/column/grand mean centering.
    Eigen::VectorXd row_mean = sq.rowwise().mean();
    double grand_mean = row_mean.mean();
    Eigen::MatrixXd b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand_mean);
    b = 0.5 * (b + b.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed to converge");

    const double b_norm = b.norm();
    const double eig_scale = solver.eigenvalues().cwiseAbs().maxCoeff();

    Embedding emb;
    emb.labels = distances.labels;
    emb.dims = k;
    emb.coordinates.assign(n * static_cast<std::size_t>(k), 0.0);
    emb.eigenvalues.resize(static_cast<std::size_t>(k));

    for (int axis = 0; axis < k; ++axis) {
        // Eigen sorts ascending; walk from the back for the largest.
        Eigen::Index idx = static_cast<Eigen::Index>(n) - 1 - axis;
        double lambda = solver.eigenvalues()(idx);
        Eigen::VectorXd v = solver.eigenvectors().col(idx);

        double residual = (b * v - lambda * v).norm();
        if (b_norm > 0.0 && residual > 1e-9 * b_norm)
            throw NumericError("eigenpair residual exceeds tolerance");

        emb.eigenvalues[static_cast<std::size_t>(axis)] = lambda;
        if (lambda < -1e-12 * std::max(1.0, eig_scale)) emb.negative_eigenvalues = true;
        // Eigenvalues at numerical zero contribute nothing; keep the axis at 0.
        if (lambda <= 1e-12 * std::max(1.0, eig_scale)) continue;

        double scale = std::sqrt(lambda);
        std::size_t flip_at = 0;
        double flip_mag = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double c = std::abs(v(static_cast<Eigen::Index>(i)));
            if (c > flip_mag) {
                flip_mag = c;
                flip_at = i;
            }
        }
        double sign = v(static_cast<Eigen::Index>(flip_at)) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i)
            emb.coordinates[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(axis)] =
                sign * scale * v(static_cast<Eigen::Index>(i));
    }

    emb.stress_value = stress(distances, emb);
    return emb;
}

double stress(const DistanceMatrix& distances, const Embedding& embedding)
{
    if (distances.labels != embedding.labels)
        throw std::invalid_argument("stress inputs must share labels");
    const std::size_t n = distances.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = distances.at(i, j);
            double dhat = 0.0;
            for (int axis = 0; axis < embedding.dims; ++axis) {
                double delta = embedding.coord(i, axis) - embedding.coord(j, axis);
                dhat += delta * delta;
            }
            dhat = std::sqrt(dhat);
            num += (d - dhat) * (d - dhat);
            den += d * d;
        }
    }
    if (den == 0.0) return 0.0;
    return std::sqrt(num / den);
}

}  // namespace pqcorr
