#include "dmclusts/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dmclusts {

using ordered_json = nlohmann::ordered_json;

namespace {

int count_distinct(const std::vector<int>& labels) {
    std::vector<int> s(labels);
    std::sort(s.begin(), s.end());
    return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
}

} // namespace

double silhouette(const Matrix& points, const std::vector<int>& labels) {
    const Eigen::Index n = points.cols();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw std::invalid_argument("silhouette: label count mismatch");
    if (count_distinct(labels) < 2)
        throw std::invalid_argument("silhouette: needs at least 2 clusters");
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels)
        ++sizes[static_cast<std::size_t>(l)];

    double total = 0;
    std::vector<double> mean_dist(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const int li = labels[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(li)] == 1)
            continue; // singleton scores 0
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i)
                continue;
            mean_dist[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] +=
                (points.col(i) - points.col(j)).norm();
        }
        const double a = mean_dist[static_cast<std::size_t>(li)] /
                         static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == li || sizes[static_cast<std::size_t>(c)] == 0)
                continue;
            b = std::min(b, mean_dist[static_cast<std::size_t>(c)] /
                                static_cast<double>(sizes[static_cast<std::size_t>(c)]));
        }
        const double denom = std::max(a, b);
        total += denom > 0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

double dunn_index(const Matrix& points, const std::vector<int>& labels) {
    const Eigen::Index n = points.cols();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw std::invalid_argument("dunn_index: label count mismatch");
    if (count_distinct(labels) < 2)
        throw std::invalid_argument("dunn_index: needs at least 2 clusters");
    double min_inter = std::numeric_limits<double>::infinity();
    double max_diam = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (points.col(i) - points.col(j)).norm();
            if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
                max_diam = std::max(max_diam, d);
            else
                min_inter = std::min(min_inter, d);
        }
    if (max_diam <= 0)
        throw std::invalid_argument("dunn_index: degenerate clusters");
    return min_inter / max_diam;
}

namespace {

std::map<std::pair<int, int>, Eigen::Index> contingency(const std::vector<int>& a,
                                                        const std::vector<int>& b) {
    std::map<std::pair<int, int>, Eigen::Index> cells;
    for (std::size_t i = 0; i < a.size(); ++i)
        ++cells[{a[i], b[i]}];
    return cells;
}

} // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("nmi: length mismatch");
    const double n = static_cast<double>(a.size());
    std::map<int, Eigen::Index> ca, cb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
    }
    double ha = 0, hb = 0;
    for (const auto& [l, c] : ca) {
        const double p = static_cast<double>(c) / n;
        ha -= p * std::log(p);
    }
    for (const auto& [l, c] : cb) {
        const double p = static_cast<double>(c) / n;
        hb -= p * std::log(p);
    }
    double mi = 0;
    for (const auto& [cell, c] : contingency(a, b)) {
        const double pij = static_cast<double>(c) / n;
        const double pi = static_cast<double>(ca[cell.first]) / n;
        const double pj = static_cast<double>(cb[cell.second]) / n;
        mi += pij * std::log(pij / (pi * pj));
    }
    const double denom = std::sqrt(ha * hb);
    if (denom <= 0)
        return 0.0;
    return std::clamp(mi / denom, 0.0, 1.0);
}

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("jaccard: length mismatch");
    auto pairs = [](Eigen::Index c) { return static_cast<double>(c) * static_cast<double>(c - 1) / 2.0; };
    double same_a = 0, same_b = 0, same_both = 0;
    std::map<int, Eigen::Index> ca, cb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
    }
    for (const auto& [l, c] : ca)
        same_a += pairs(c);
    for (const auto& [l, c] : cb)
        same_b += pairs(c);
    for (const auto& [cell, c] : contingency(a, b))
        same_both += pairs(c);
    const double uni = same_a + same_b - same_both;
    return uni > 0 ? same_both / uni : 0.0;
}

namespace {

// best one-to-one assignment of planted labelings to clusterings,
// maximizing total NMI; brute force over permutations (M is small)
std::vector<TruthMatch> match_truth(const std::vector<Clustering>& cl, const PlantedTruth& truth) {
    const int T = static_cast<int>(truth.labelings.size());
    const int M = static_cast<int>(cl.size());
    Matrix score(T, M);
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < M; ++m)
            score(t, m) = nmi(truth.labelings[static_cast<std::size_t>(t)],
                              cl[static_cast<std::size_t>(m)].labels);
    std::vector<int> perm(static_cast<std::size_t>(M));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_perm = perm;
    double best = -1;
    do {
        double s = 0;
        for (int t = 0; t < std::min(T, M); ++t)
            s += score(t, perm[static_cast<std::size_t>(t)]);
        if (s > best) {
            best = s;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<TruthMatch> out;
    for (int t = 0; t < std::min(T, M); ++t)
        out.push_back({t, best_perm[static_cast<std::size_t>(t)],
                       score(t, best_perm[static_cast<std::size_t>(t)])});
    return out;
}

} // namespace

EvaluationReport evaluate(const MultiViewDataset& ds, const std::vector<Clustering>& clusterings,
                          const PlantedTruth* truth) {
    if (clusterings.empty())
        throw std::invalid_argument("evaluate: no clusterings");
    Eigen::Index d_total = 0;
    for (const Matrix& X : ds.views)
        d_total += X.rows();
    Matrix cat(d_total, ds.n());
    Eigen::Index row = 0;
    for (const Matrix& X : ds.views) {
        cat.middleRows(row, X.rows()) = X;
        row += X.rows();
    }

    EvaluationReport rep;
    for (const Clustering& c : clusterings) {
        rep.sc.push_back(silhouette(cat, c.labels));
        rep.di.push_back(dunn_index(cat, c.labels));
    }
    rep.mean_sc = std::accumulate(rep.sc.begin(), rep.sc.end(), 0.0) / static_cast<double>(rep.sc.size());
    rep.mean_di = std::accumulate(rep.di.begin(), rep.di.end(), 0.0) / static_cast<double>(rep.di.size());

    for (std::size_t i = 0; i < clusterings.size(); ++i)
        for (std::size_t j = i + 1; j < clusterings.size(); ++j)
            rep.pairs.push_back({static_cast<int>(i), static_cast<int>(j),
                                 nmi(clusterings[i].labels, clusterings[j].labels),
                                 jaccard(clusterings[i].labels, clusterings[j].labels)});
    if (!rep.pairs.empty()) {
        for (const PairDiversity& p : rep.pairs) {
            rep.mean_nmi += p.nmi;
            rep.mean_jc += p.jc;
        }
        rep.mean_nmi /= static_cast<double>(rep.pairs.size());
        rep.mean_jc /= static_cast<double>(rep.pairs.size());
    }
    if (truth && !truth->labelings.empty())
        rep.truth_match = match_truth(clusterings, *truth);
    return rep;
}

std::string report_to_json(const EvaluationReport& rep) {
    ordered_json j;
    ordered_json per = ordered_json::array();
    for (std::size_t m = 0; m < rep.sc.size(); ++m)
        per.push_back({{"sc", rep.sc[m]}, {"di", rep.di[m]}});
    j["quality"] = {{"per_clustering", per}, {"mean", {{"sc", rep.mean_sc}, {"di", rep.mean_di}}}};
    ordered_json pairs = ordered_json::array();
    for (const PairDiversity& p : rep.pairs)
        pairs.push_back({{"first", p.first}, {"second", p.second}, {"nmi", p.nmi}, {"jc", p.jc}});
    j["diversity"] = {{"pairs", pairs}, {"mean", {{"nmi", rep.mean_nmi}, {"jc", rep.mean_jc}}}};
    if (!rep.truth_match.empty()) {
        ordered_json tm = ordered_json::array();
        for (const TruthMatch& t : rep.truth_match)
            tm.push_back({{"labeling", t.labeling}, {"clustering", t.clustering}, {"nmi", t.nmi}});
        j["truth_match"] = tm;
    }
    j["meta"] = ordered_json::parse(rep.meta_json);
    return j.dump(2);
}

} // namespace dmclusts
