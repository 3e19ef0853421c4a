// Multi-view dataset container, CSV/JSON persistence and synthetic generators.

#ifndef DMCLUSTS_DATASET_HPP
#define DMCLUSTS_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dmclusts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// V feature matrices over the same n samples. Each view is d_v x n
/// (features as rows, samples as columns); entries may be mixed-sign.
struct MultiViewDataset {
    std::vector<Matrix> views;
    std::vector<std::string> view_names;

    Eigen::Index n() const { return views.empty() ? 0 : views.front().cols(); }
    int num_views() const { return static_cast<int>(views.size()); }

    /// Throws std::invalid_argument on any violated invariant
    /// (empty view list, column-count mismatch, non-finite entries).
    void validate() const;
};

/// Ground truth planted by the synthetic generator: one or more label
/// vectors over the same samples, each encoded by a subset of views.
struct PlantedTruth {
    std::vector<std::vector<int>> labelings;          // each length n, values in [0, k_j)
    std::vector<std::vector<int>> view_assignment;    // view indices per labeling
};

/// One planted clustering structure for generate_synthetic.
struct StructureSpec {
    int k = 2;              // clusters in this labeling, >= 2
    int num_views = 1;      // fresh views encoding it, >= 1
    int dim = 10;           // features per view, >= k
    double separation = 10; // pairwise distance between cluster means
    double sigma = 1.0;     // per-coordinate Gaussian noise, >= 0
};

MultiViewDataset load_dataset(const std::filesystem::path& manifest_path);
MultiViewDataset load_dataset(const std::filesystem::path& manifest_path, PlantedTruth* truth);

/// Writes manifest.json plus one CSV per view (and label files when truth
/// is given) into dir; returns the manifest path.
std::filesystem::path save_dataset(const MultiViewDataset& ds, const std::filesystem::path& dir,
                                   const PlantedTruth* truth = nullptr);

std::pair<MultiViewDataset, PlantedTruth>
generate_synthetic(int n, const std::vector<StructureSpec>& spec, std::uint64_t seed);

/// Appends an i.i.d. standard-normal view of dimension d.
MultiViewDataset add_noise_view(const MultiViewDataset& ds, int d, std::uint64_t seed);

/// Per-feature z-score (rows with zero variance are left centered only).
MultiViewDataset zscore(const MultiViewDataset& ds);

// CSV helpers shared with the harness: samples as rows on disk,
// transposed to d x n in memory.
Matrix read_csv_matrix(const std::filesystem::path& file);
void write_csv_matrix(const Matrix& m, const std::filesystem::path& file);
std::vector<int> read_labels(const std::filesystem::path& file);
void write_labels(const std::vector<int>& labels, const std::filesystem::path& file);

} // namespace dmclusts

#endif
