// Clustering validity indexes: quality (silhouette, Dunn) and pairwise
// diversity (NMI, Jaccard), plus report aggregation and JSON serialization.

#ifndef DMCLUSTS_METRICS_HPP
#define DMCLUSTS_METRICS_HPP

#include "dmclusts/dataset.hpp"
#include "dmclusts/kmeans.hpp"

#include <optional>
#include <string>

namespace dmclusts {

/// Mean silhouette over samples; singleton clusters score 0, a==b scores 0.
/// Columns of `points` are samples. Requires >= 2 distinct clusters.
double silhouette(const Matrix& points, const std::vector<int>& labels);

/// Min single-linkage inter-cluster distance / max intra-cluster diameter.
/// Throws on zero max diameter.
double dunn_index(const Matrix& points, const std::vector<int>& labels);

/// Mutual information normalized by sqrt(H(a) * H(b)), natural log; 0/0 -> 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

/// Pair-counting Jaccard: |same in both| / |same in a or same in b|; empty union -> 0.
double jaccard(const std::vector<int>& a, const std::vector<int>& b);

struct PairDiversity {
    int first = 0, second = 0;
    double nmi = 0.0, jc = 0.0;
};

struct TruthMatch {
    int labeling = 0;   // index into the planted truth
    int clustering = 0; // matched clustering index
    double nmi = 0.0;
};

struct EvaluationReport {
    std::vector<double> sc;  // per clustering
    std::vector<double> di;
    double mean_sc = 0.0, mean_di = 0.0;
    std::vector<PairDiversity> pairs;
    double mean_nmi = 0.0, mean_jc = 0.0;
    std::vector<TruthMatch> truth_match; // empty when no truth given
    std::string meta_json = "{}";        // run metadata blob merged into the report
};

/// SC/DI on the concatenated raw feature space, pairwise NMI/JC for every
/// clustering pair, and best-assignment ground-truth NMI when truth is given.
EvaluationReport evaluate(const MultiViewDataset& ds, const std::vector<Clustering>& clusterings,
                          const PlantedTruth* truth = nullptr);

std::string report_to_json(const EvaluationReport& rep);

} // namespace dmclusts

#endif
