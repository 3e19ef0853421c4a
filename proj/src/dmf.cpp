#include "dmclusts/dmf.hpp"

namespace dmclusts {

Matrix concat_views(const MultiViewDataset& ds) {
    ds.validate();
    Eigen::Index d_total = 0;
    for (const Matrix& X : ds.views)
        d_total += X.rows();
    Matrix cat(d_total, ds.n());
    Eigen::Index row = 0;
    for (const Matrix& X : ds.views) {
        cat.middleRows(row, X.rows()) = X;
        row += X.rows();
    }
    return cat;
}

DmfResult dmf_fit(const MultiViewDataset& ds, const SolverConfig& cfg) {
    MultiViewDataset cat;
    cat.views.push_back(concat_views(ds));
    cat.view_names.push_back("concat");

    SolverConfig flat = cfg;
    flat.lambda = 0.0; // no diversity penalty in the baseline

    FitResult inner = fit(cat, flat);
    DmfResult out;
    out.state.Z = std::move(inner.state.Z.front());
    out.state.H = std::move(inner.state.H);
    out.history.reserve(inner.history.size());
    for (const ObjectiveBreakdown& o : inner.history)
        out.history.push_back(o.total);
    out.iterations = inner.iterations;
    out.converged = inner.converged;
    return out;
}

} // namespace dmclusts
