#include "dmclusts/solver.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dmclusts {

namespace {
constexpr double kEps = 1e-9;       // multiplicative-update denominator stabilizer
constexpr double kThetaFloor = 1e-12; // residual floor before exponentiation in the alpha update
} // namespace

void SolverConfig::validate(const MultiViewDataset* ds) const {
    const int M = num_clusterings;
    if (M < 1)
        throw std::invalid_argument("num_clusterings must be >= 1");
    if (static_cast<int>(layer_sizes.size()) != M)
        throw std::invalid_argument("layer_sizes must have one entry per clustering");
    if (clusters < 2)
        throw std::invalid_argument("clusters must be >= 2");
    for (int l = 0; l < M; ++l) {
        if (layer_sizes[static_cast<std::size_t>(l)] < clusters)
            throw std::invalid_argument("layer sizes must be >= the cluster count");
        if (l > 0 && layer_sizes[static_cast<std::size_t>(l)] > layer_sizes[static_cast<std::size_t>(l - 1)])
            throw std::invalid_argument("layer sizes must be non-increasing");
    }
    if (ds) {
        Eigen::Index d_min = ds->views.front().rows();
        for (const Matrix& X : ds->views)
            d_min = std::min(d_min, X.rows());
        if (layer_sizes.front() > d_min)
            throw std::invalid_argument("K_1 exceeds the smallest view dimension");
    }
    if (lambda < 0)
        throw std::invalid_argument("lambda must be >= 0");
    if (beta < 0 || beta > 1)
        throw std::invalid_argument("beta must be in [0, 1]");
    if (r <= 0 || r == 1.0)
        throw std::invalid_argument("r must be > 0 and != 1");
    if (max_iter < 1)
        throw std::invalid_argument("max_iter must be >= 1");
    if (tol < 0)
        throw std::invalid_argument("tol must be >= 0");
}

Matrix FactorState::chain(int v, int first, int last) const {
    const auto& zs = Z[static_cast<std::size_t>(v)];
    if (last < first) {
        // empty product: identity sized to the slot between layers first-1 and first
        const Eigen::Index dim = first - 1 < static_cast<int>(zs.size())
                                     ? zs[static_cast<std::size_t>(first - 1)].rows()
                                     : zs.back().cols();
        return Matrix::Identity(dim, dim);
    }
    Matrix out = zs[static_cast<std::size_t>(first - 1)];
    for (int l = first; l < last; ++l)
        out = out * zs[static_cast<std::size_t>(l)];
    return out;
}

double redundancy_overlap(const Matrix& Ha, const Matrix& Hb) {
    if (Ha.cols() != Hb.cols())
        throw std::invalid_argument("redundancy_overlap: column-count mismatch");
    // tr(Ha^T Ha Hb^T Hb) == ||Ha Hb^T||_F^2, no n x n intermediate
    return (Ha * Hb.transpose()).squaredNorm();
}

double redundancy_balanced(const Matrix& Ha, const Matrix& Hb, double beta) {
    if (Ha.cols() != Hb.cols())
        throw std::invalid_argument("redundancy_balanced: column-count mismatch");
    if (beta < 0 || beta > 1)
        throw std::invalid_argument("redundancy_balanced: beta out of range");
    const double n = static_cast<double>(Ha.cols());
    const double overlap = (Ha * Hb.transpose()).squaredNorm();
    // tr((1 - Ha^T Ha)(1 - Hb^T Hb)) with 1 the n x n all-ones matrix:
    // n^2 - sum(Ha^T Ha) - sum(Hb^T Hb) + overlap
    const double sum_a = Ha.rowwise().sum().squaredNorm();
    const double sum_b = Hb.rowwise().sum().squaredNorm();
    return beta * overlap + (1.0 - beta) * (n * n - sum_a - sum_b + overlap);
}

FactorState pretrain(const MultiViewDataset& ds, const SolverConfig& cfg) {
    ds.validate();
    cfg.validate(&ds);
    const int V = ds.num_views();
    const int M = cfg.num_clusterings;

    FactorState state;
    state.Z.resize(static_cast<std::size_t>(V));

    // layer 1: shared H from the stacked views, per-view basis blocks
    Eigen::Index d_total = 0;
    for (const Matrix& X : ds.views)
        d_total += X.rows();
    Matrix cat(d_total, ds.n());
    Eigen::Index row = 0;
    for (const Matrix& X : ds.views) {
        cat.middleRows(row, X.rows()) = X;
        row += X.rows();
    }
    SemiNmfResult layer1 = seminmf_fit(cat, cfg.layer_sizes[0], cfg.pretrain_iter, cfg.pretrain_tol, cfg.seed);
    row = 0;
    for (int v = 0; v < V; ++v) {
        state.Z[static_cast<std::size_t>(v)].push_back(
            layer1.Z.middleRows(row, ds.views[static_cast<std::size_t>(v)].rows()));
        row += ds.views[static_cast<std::size_t>(v)].rows();
    }
    state.H.push_back(layer1.H);

    // deeper layers: factorize the previous representation, basis copied to every view
    for (int l = 1; l < M; ++l) {
        SemiNmfResult deep = seminmf_fit(state.H.back(), cfg.layer_sizes[static_cast<std::size_t>(l)],
                                         cfg.pretrain_iter, cfg.pretrain_tol,
                                         cfg.seed + static_cast<std::uint64_t>(l));
        for (int v = 0; v < V; ++v)
            state.Z[static_cast<std::size_t>(v)].push_back(deep.Z);
        state.H.push_back(deep.H);
    }

    state.alpha = Matrix::Constant(M, V, 1.0 / static_cast<double>(V));
    return state;
}

namespace {

// (alpha_i^(v))^r for layers i >= m, rescaled by the max so the update's
// scale invariance in alpha also holds numerically.
std::vector<double> layer_weights(const FactorState& state, const SolverConfig& cfg, int m, int v) {
    const int M = state.num_layers();
    std::vector<double> w(static_cast<std::size_t>(M - m));
    double wmax = 0;
    for (int i = m; i < M; ++i) {
        w[static_cast<std::size_t>(i - m)] = std::pow(std::max(state.alpha(i, v), 0.0), cfg.r);
        wmax = std::max(wmax, w[static_cast<std::size_t>(i - m)]);
    }
    for (double& x : w)
        x = wmax > 0 ? x / wmax : 1.0;
    return w;
}

Matrix multiplicative_update(const Matrix& H, const Matrix& num, const Matrix& den) {
    Matrix out = H;
    for (Eigen::Index i = 0; i < H.rows(); ++i)
        for (Eigen::Index j = 0; j < H.cols(); ++j) {
            if (num(i, j) <= 0.0 && den(i, j) <= 0.0)
                continue; // 0/0: leave the entry unchanged
            out(i, j) = H(i, j) * std::sqrt(num(i, j) / (den(i, j) + kEps));
        }
    return out;
}

// sum_{m' != m} [H_m H_{m'}^T H_{m'} - (1-beta) H_m 1_{nxn}], 1 never materialized
Matrix gamma_term(const FactorState& state, const SolverConfig& cfg, int m) {
    const Matrix& Hm = state.H[static_cast<std::size_t>(m)];
    Matrix gamma = Matrix::Zero(Hm.rows(), Hm.cols());
    const Vector row_sums = Hm.rowwise().sum();
    for (int mp = 0; mp < state.num_layers(); ++mp) {
        if (mp == m)
            continue;
        const Matrix& Hp = state.H[static_cast<std::size_t>(mp)];
        gamma.noalias() += (Hm * Hp.transpose()) * Hp;
        gamma.noalias() -= (1.0 - cfg.beta) * row_sums * Eigen::RowVectorXd::Ones(Hm.cols());
    }
    return gamma;
}

} // namespace

Matrix update_Z(const FactorState& state, const MultiViewDataset& ds, const SolverConfig& cfg, int m, int v) {
    const int M = state.num_layers();
    const Matrix& X = ds.views[static_cast<std::size_t>(v)];
    const Matrix phi = state.chain(v, 1, m);      // identity when m == 0
    const Matrix phi_tx = phi.transpose() * X;
    const std::vector<double> w = layer_weights(state, cfg, m, v);

    const Eigen::Index Km = state.Z[static_cast<std::size_t>(v)][static_cast<std::size_t>(m)].cols();
    Matrix T = Matrix::Zero(phi.cols(), Km);
    Matrix S = Matrix::Zero(Km, Km);
    for (int i = m; i < M; ++i) {
        // H_mi = Z_{m+2} ... Z_{i+1} H_i (1-based layers), H_mm = H_m
        const Matrix Hmi = i == m ? state.H[static_cast<std::size_t>(i)]
                                  : Matrix(state.chain(v, m + 2, i + 1) * state.H[static_cast<std::size_t>(i)]);
        const double wi = w[static_cast<std::size_t>(i - m)];
        T.noalias() += wi * phi_tx * Hmi.transpose();
        S.noalias() += wi * Hmi * Hmi.transpose();
    }
    return pinv(phi.transpose() * phi) * T * pinv(S);
}

Matrix update_H(const FactorState& state, const MultiViewDataset& ds, const SolverConfig& cfg, int m) {
    const Matrix& Hm = state.H[static_cast<std::size_t>(m)];
    Matrix Q = Matrix::Zero(Hm.rows(), Hm.cols());
    Matrix P = Matrix::Zero(Hm.rows(), Hm.rows());
    for (int v = 0; v < ds.num_views(); ++v) {
        const double w = std::pow(std::max(state.alpha(m, v), 0.0), cfg.r);
        const Matrix z_all = state.chain(v, 1, m + 1);
        Q.noalias() += w * z_all.transpose() * ds.views[static_cast<std::size_t>(v)];
        P.noalias() += w * z_all.transpose() * z_all;
    }
    const Matrix gamma = gamma_term(state, cfg, m);
    const Matrix num = positive_part(Q) + negative_part(P) * Hm + cfg.lambda * negative_part(gamma);
    const Matrix den = negative_part(Q) + positive_part(P) * Hm + cfg.lambda * positive_part(gamma);
    Matrix out = multiplicative_update(Hm, num, den);
    if (!out.allFinite())
        throw std::runtime_error("update_H: non-finite representation at layer " + std::to_string(m));
    return out;
}

Vector update_alpha(const FactorState& state, const MultiViewDataset& ds, const SolverConfig& cfg, int m) {
    const int V = ds.num_views();
    Vector log_u(V);
    for (int v = 0; v < V; ++v) {
        double theta = (ds.views[static_cast<std::size_t>(v)] -
                        state.chain(v, 1, m + 1) * state.H[static_cast<std::size_t>(m)])
                           .squaredNorm();
        if (!std::isfinite(theta))
            throw std::runtime_error("update_alpha: non-finite residual for view " + std::to_string(v));
        theta = std::max(theta, kThetaFloor);
        log_u(v) = std::log(cfg.r * theta) / (1.0 - cfg.r);
    }
    // normalize in log space
    const double shift = log_u.maxCoeff();
    Vector alpha = (log_u.array() - shift).exp();
    alpha /= alpha.sum();
    return alpha;
}

ObjectiveBreakdown objective(const FactorState& state, const MultiViewDataset& ds, const SolverConfig& cfg) {
    const int M = state.num_layers();
    const int V = ds.num_views();
    ObjectiveBreakdown out;
    out.reconstruction = Matrix::Zero(M, V);
    for (int m = 0; m < M; ++m)
        for (int v = 0; v < V; ++v) {
            const double res = (ds.views[static_cast<std::size_t>(v)] -
                                state.chain(v, 1, m + 1) * state.H[static_cast<std::size_t>(m)])
                                   .squaredNorm();
            out.reconstruction(m, v) = std::pow(std::max(state.alpha(m, v), 0.0), cfg.r) * res;
        }
    for (int m = 0; m < M; ++m)
        for (int mp = 0; mp < M; ++mp)
            if (mp != m)
                out.redundancy += redundancy_balanced(state.H[static_cast<std::size_t>(m)],
                                                      state.H[static_cast<std::size_t>(mp)], cfg.beta);
    out.redundancy *= cfg.lambda;
    out.total = out.reconstruction.sum() + out.redundancy;
    if (!std::isfinite(out.total))
        throw std::runtime_error("objective: non-finite value");
    return out;
}

Matrix redundancy_gradient(const FactorState& state, const SolverConfig& cfg, int m) {
    return 2.0 * gamma_term(state, cfg, m);
}

namespace {

FactorState random_init(const MultiViewDataset& ds, const SolverConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int M = cfg.num_clusterings;
    const int V = ds.num_views();
    FactorState state;
    state.H.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        Matrix& H = state.H[static_cast<std::size_t>(m)];
        H.resize(cfg.layer_sizes[static_cast<std::size_t>(m)], ds.n());
        for (Eigen::Index i = 0; i < H.rows(); ++i)
            for (Eigen::Index j = 0; j < H.cols(); ++j)
                H(i, j) = unit(rng);
    }
    state.Z.resize(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) {
        // layer 1 by least squares on the data, deeper layers on H chains
        const Matrix& H1 = state.H[0];
        state.Z[static_cast<std::size_t>(v)].push_back(ds.views[static_cast<std::size_t>(v)] * H1.transpose() *
                                                       pinv(H1 * H1.transpose()));
        for (int l = 1; l < M; ++l) {
            const Matrix& Hl = state.H[static_cast<std::size_t>(l)];
            state.Z[static_cast<std::size_t>(v)].push_back(state.H[static_cast<std::size_t>(l - 1)] *
                                                           Hl.transpose() * pinv(Hl * Hl.transpose()));
        }
    }
    state.alpha = Matrix::Constant(M, V, 1.0 / static_cast<double>(V));
    return state;
}

} // namespace

FitResult fit(const MultiViewDataset& ds, const SolverConfig& cfg) {
    ds.validate();
    cfg.validate(&ds);

    FitResult result;
    result.state = cfg.pretrain ? pretrain(ds, cfg) : random_init(ds, cfg);
    result.history.push_back(objective(result.state, ds, cfg));

    FactorState& state = result.state;
    const int M = cfg.num_clusterings;
    const int V = ds.num_views();
    for (int it = 0; it < cfg.max_iter; ++it) {
        for (int m = 0; m < M; ++m) {
            for (int v = 0; v < V; ++v)
                state.Z[static_cast<std::size_t>(v)][static_cast<std::size_t>(m)] =
                    update_Z(state, ds, cfg, m, v);
            state.H[static_cast<std::size_t>(m)] = update_H(state, ds, cfg, m);
            state.alpha.row(m) = update_alpha(state, ds, cfg, m).transpose();
        }
        ObjectiveBreakdown obj;
        try {
            obj = objective(state, ds, cfg);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("fit: diverged at iteration " + std::to_string(it + 1));
        }
        const double prev = result.history.back().total;
        result.history.push_back(obj);
        result.iterations = it + 1;
        if (std::abs(prev - obj.total) / std::max(std::abs(prev), 1e-12) < cfg.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

} // namespace dmclusts
