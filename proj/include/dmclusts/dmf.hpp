// Plain deep semi-NMF on the concatenated views: no view weighting,
// no diversity penalty. Baseline for comparing against the weighted solver.

#ifndef DMCLUSTS_DMF_HPP
#define DMCLUSTS_DMF_HPP

#include "dmclusts/solver.hpp"

namespace dmclusts {

struct DmfState {
    std::vector<Matrix> Z; // chain on the (sum d_v) x n concatenated matrix
    std::vector<Matrix> H; // H_1..H_M, nonnegative
};

/// Vertical stacking in view order; column j stays sample j.
Matrix concat_views(const MultiViewDataset& ds);

struct DmfResult {
    DmfState state;
    std::vector<double> history; // reconstruction objective per sweep
    int iterations = 0;
    bool converged = false;
};

/// Layer-wise pretraining then alternating fine-tuning, sharing the update
/// machinery of the weighted solver with V=1, lambda=0, alpha=1.
DmfResult dmf_fit(const MultiViewDataset& ds, const SolverConfig& cfg);

} // namespace dmclusts

#endif
