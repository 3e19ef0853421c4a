// DMClusts solver: layer-wise weighted deep semi-NMF of multi-view data
// with a balanced redundancy penalty between the per-layer representations.

#ifndef DMCLUSTS_SOLVER_HPP
#define DMCLUSTS_SOLVER_HPP

#include "dmclusts/dataset.hpp"
#include "dmclusts/seminmf.hpp"

namespace dmclusts {

struct SolverConfig {
    int num_clusterings = 2;            // M: layers == alternative clusterings
    std::vector<int> layer_sizes{20, 10}; // K_1..K_M, monotone non-increasing
    int clusters = 3;                   // k used by the final per-layer k-means
    double lambda = 0.01;               // diversity weight, >= 0
    double beta = 0.4;                  // balance coefficient in [0, 1]
    double r = 0.5;                     // weight-distribution exponent, > 0 and != 1
    int max_iter = 100;
    double tol = 1e-5;                  // relative objective tolerance
    std::uint64_t seed = 0;
    bool pretrain = true;
    int pretrain_iter = 100;            // inner semi-NMF iterations per layer
    double pretrain_tol = 1e-6;

    /// Throws std::invalid_argument when any invariant is violated
    /// (d_min caps K_1 only when a dataset is supplied).
    void validate(const MultiViewDataset* ds = nullptr) const;
};

struct FactorState {
    // Z[v][l]: layer l basis for view v; Z[v][0] is d_v x K_1,
    // deeper layers are K_{l-1} x K_l.
    std::vector<std::vector<Matrix>> Z;
    std::vector<Matrix> H;      // H[m]: K_{m+1} x n, nonnegative, shared across views
    Matrix alpha;               // M x V, rows on the probability simplex

    int num_layers() const { return static_cast<int>(H.size()); }
    int num_views() const { return static_cast<int>(Z.size()); }

    /// Product Z_1^(v) ... Z_{m}^(v) for layers [first, last] (1-based,
    /// inclusive); identity-sized empty product collapses to the right thing
    /// at call sites via chain_product(v, 1, 0) being invalid -- callers pass
    /// valid ranges only.
    Matrix chain(int v, int first, int last) const;
};

struct ObjectiveBreakdown {
    double total = 0.0;
    Matrix reconstruction;  // M x V: (alpha_m^v)^r * ||X^v - Z_1..Z_m H_m||_F^2
    double redundancy = 0.0; // lambda * sum over ordered pairs m != m'
};

/// tr(Ha^T Ha Hb^T Hb): soft co-association overlap of two representations.
double redundancy_overlap(const Matrix& Ha, const Matrix& Hb);

/// beta * overlap + (1-beta) * tr((1 - Ha^T Ha)(1 - Hb^T Hb)), the all-ones
/// matrix never materialized.
double redundancy_balanced(const Matrix& Ha, const Matrix& Hb, double beta);

FactorState pretrain(const MultiViewDataset& ds, const SolverConfig& cfg);

/// Closed-form least-squares update of Z at (layer m, view v); 0-based indices.
Matrix update_Z(const FactorState& state, const MultiViewDataset& ds,
                const SolverConfig& cfg, int m, int v);

/// Multiplicative update of H_m; keeps H_m >= 0.
Matrix update_H(const FactorState& state, const MultiViewDataset& ds,
                const SolverConfig& cfg, int m);

/// Simplex-constrained view weights for layer m from the per-view residuals.
Vector update_alpha(const FactorState& state, const MultiViewDataset& ds,
                    const SolverConfig& cfg, int m);

ObjectiveBreakdown objective(const FactorState& state, const MultiViewDataset& ds,
                             const SolverConfig& cfg);

/// Gradient of the lambda-free balanced redundancy penalty
/// sum_{m' != m} R~(H_m, H_{m'}) with respect to H_m.
Matrix redundancy_gradient(const FactorState& state, const SolverConfig& cfg, int m);

struct FitResult {
    FactorState state;
    std::vector<ObjectiveBreakdown> history; // one entry per sweep, plus the initial value
    int iterations = 0;
    bool converged = false;
};

/// Pretrain (unless disabled) then alternate {Z, H, alpha} sweeps until the
/// relative objective change drops below cfg.tol or max_iter is reached.
FitResult fit(const MultiViewDataset& ds, const SolverConfig& cfg);

} // namespace dmclusts

#endif
