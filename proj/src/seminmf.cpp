#include "dmclusts/seminmf.hpp"

#include "dmclusts/kmeans.hpp"

#include <stdexcept>

namespace dmclusts {

namespace {
constexpr double kEps = 1e-9; // multiplicative-update denominator stabilizer
}

Matrix pinv(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0)
        return Matrix::Zero(A.cols(), A.rows());
    const double cutoff = 1e-10 * sv(0);
    Vector inv = sv;
    for (Eigen::Index i = 0; i < inv.size(); ++i)
        inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix positive_part(const Matrix& A) { return (A.array().abs() + A.array()) * 0.5; }
Matrix negative_part(const Matrix& A) { return (A.array().abs() - A.array()) * 0.5; }

namespace {

// Multiplicative semi-NMF step: H <- H .* sqrt((A+ + B- H) / (A- + B+ H)),
// A = Z^T X, B = Z^T Z. Entries with vanishing numerator and denominator
// are left unchanged.
Matrix multiplicative_H_step(const Matrix& H, const Matrix& A, const Matrix& B) {
    const Matrix num = positive_part(A) + negative_part(B) * H;
    const Matrix den = negative_part(A) + positive_part(B) * H;
    Matrix out = H;
    for (Eigen::Index i = 0; i < H.rows(); ++i)
        for (Eigen::Index j = 0; j < H.cols(); ++j) {
            if (num(i, j) <= 0.0 && den(i, j) <= 0.0)
                continue;
            out(i, j) = H(i, j) * std::sqrt(num(i, j) / (den(i, j) + kEps));
        }
    return out;
}

} // namespace

SemiNmfResult seminmf_fit(const Matrix& X, int K, int max_iter, double tol, std::uint64_t seed) {
    if (!X.allFinite())
        throw std::invalid_argument("seminmf_fit: non-finite input");
    if (K < 1 || K > std::min(X.rows(), X.cols()))
        throw std::invalid_argument("seminmf_fit: K out of range");

    SemiNmfResult res;
    if (X.isZero(0.0)) {
        res.Z = Matrix::Zero(X.rows(), K);
        res.H = Matrix::Zero(K, X.cols());
        res.residual = 0.0;
        res.zero_input = true;
        return res;
    }

    // k-means membership init for H: one-hot plus constant offset
    KMeansOptions opt;
    opt.n_init = 1;
    opt.max_iter = 50;
    Clustering km = kmeans(X, K, seed, opt);
    Matrix H = Matrix::Constant(K, X.cols(), 0.2);
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        H(km.labels[static_cast<std::size_t>(j)], j) += 1.0;

    Matrix Z = X * H.transpose() * pinv(H * H.transpose());
    double prev = (X - Z * H).squaredNorm();
    for (int it = 0; it < max_iter; ++it) {
        Z = X * H.transpose() * pinv(H * H.transpose());
        H = multiplicative_H_step(H, Z.transpose() * X, Z.transpose() * Z);
        const double cur = (X - Z * H).squaredNorm();
        if (!std::isfinite(cur))
            throw std::runtime_error("seminmf_fit: non-finite residual at iteration " + std::to_string(it));
        if (std::abs(prev - cur) / std::max(prev, 1e-12) < tol) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    res.Z = std::move(Z);
    res.H = std::move(H);
    res.residual = prev;
    return res;
}

} // namespace dmclusts
