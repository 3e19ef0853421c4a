#include "dmclusts/kmeans.hpp"

#include <limits>
#include <random>
#include <stdexcept>

namespace dmclusts {

namespace {

// k-means++ seeding over columns.
Matrix plus_plus_init(const Matrix& pts, int k, std::mt19937_64& rng) {
    const Eigen::Index n = pts.cols();
    Matrix centroids(pts.rows(), k);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centroids.col(0) = pts.col(first(rng));
    Vector d2 = (pts.colwise() - centroids.col(0)).colwise().squaredNorm().transpose();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index chosen = 0;
        if (total > 0) {
            double target = unit(rng) * total;
            double acc = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                acc += d2(j);
                if (acc >= target) {
                    chosen = j;
                    break;
                }
            }
        } else {
            chosen = first(rng); // all points coincide with a centroid
        }
        centroids.col(c) = pts.col(chosen);
        d2 = d2.cwiseMin((pts.colwise() - centroids.col(c)).colwise().squaredNorm().transpose());
    }
    return centroids;
}

struct LloydResult {
    std::vector<int> labels;
    double inertia = 0.0;
};

LloydResult lloyd(const Matrix& pts, Matrix centroids, int k, int max_iter) {
    const Eigen::Index n = pts.cols();
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    double inertia = 0;
    for (int it = 0; it < max_iter; ++it) {
        // assignment
        inertia = 0;
        bool changed = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (pts.col(j) - centroids.col(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(j)] != best) {
                labels[static_cast<std::size_t>(j)] = best;
                changed = true;
            }
            inertia += best_d;
        }
        // empty-cluster repair: steal the point farthest from its centroid
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (int l : labels)
            ++counts[static_cast<std::size_t>(l)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0)
                continue;
            Eigen::Index farthest = 0;
            double far_d = -1;
            for (Eigen::Index j = 0; j < n; ++j) {
                const int l = labels[static_cast<std::size_t>(j)];
                if (counts[static_cast<std::size_t>(l)] <= 1)
                    continue;
                const double d = (pts.col(j) - centroids.col(l)).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    farthest = j;
                }
            }
            --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])];
            labels[static_cast<std::size_t>(farthest)] = c;
            ++counts[static_cast<std::size_t>(c)];
            changed = true;
        }
        // centroid update
        Matrix sums = Matrix::Zero(pts.rows(), k);
        for (Eigen::Index j = 0; j < n; ++j)
            sums.col(labels[static_cast<std::size_t>(j)]) += pts.col(j);
        for (int c = 0; c < k; ++c)
            centroids.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        if (!changed)
            break;
    }
    // final inertia against converged centroids
    inertia = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        inertia += (pts.col(j) - centroids.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
    return {std::move(labels), inertia};
}

} // namespace

Clustering kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opt) {
    if (!points.allFinite())
        throw std::invalid_argument("kmeans: non-finite points");
    if (k < 1 || k > points.cols())
        throw std::invalid_argument("kmeans: k out of range");

    Matrix pts = points;
    if (opt.normalize_columns)
        for (Eigen::Index j = 0; j < pts.cols(); ++j) {
            const double nrm = pts.col(j).norm();
            if (nrm > 0)
                pts.col(j) /= nrm;
        }

    Clustering best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < std::max(1, opt.n_init); ++restart) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(restart));
        LloydResult r = lloyd(pts, plus_plus_init(pts, k, rng), k, opt.max_iter);
        if (r.inertia < best.inertia) { // strict: ties keep the earliest restart
            best.labels = std::move(r.labels);
            best.inertia = r.inertia;
        }
    }
    best.k = k;
    return best;
}

std::vector<Clustering> extract_clusterings(const std::vector<Matrix>& reps, int k, std::uint64_t seed,
                                            const KMeansOptions& opt) {
    std::vector<Clustering> out;
    out.reserve(reps.size());
    for (std::size_t m = 0; m < reps.size(); ++m)
        out.push_back(kmeans(reps[m], k, seed + 1000003 * static_cast<std::uint64_t>(m), opt));
    return out;
}

} // namespace dmclusts
