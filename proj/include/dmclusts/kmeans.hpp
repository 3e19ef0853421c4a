// Seeded k-means (k-means++ init, Lloyd iterations) over matrix columns.

#ifndef DMCLUSTS_KMEANS_HPP
#define DMCLUSTS_KMEANS_HPP

#include "dmclusts/dataset.hpp"

namespace dmclusts {

struct Clustering {
    std::vector<int> labels; // length n, values in [0, k)
    int k = 0;
    double inertia = 0.0;    // sum of squared distances to assigned centroids
};

struct KMeansOptions {
    int max_iter = 100;
    int n_init = 10;     // restarts; best inertia wins, ties -> lowest restart index
    bool normalize_columns = false; // L2-normalize columns before clustering
};

/// Columns of `points` are samples. Empty clusters are repaired by
/// reassigning the point farthest from its centroid, so exactly k
/// clusters are always produced.
Clustering kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opt = {});

/// k-means on each representation H_m with per-layer derived seeds.
std::vector<Clustering> extract_clusterings(const std::vector<Matrix>& reps, int k,
                                            std::uint64_t seed, const KMeansOptions& opt = {});

} // namespace dmclusts

#endif
