// Shallow semi-NMF: X ~ Z H with H >= 0, Z unconstrained in sign.

#ifndef DMCLUSTS_SEMINMF_HPP
#define DMCLUSTS_SEMINMF_HPP

#include "dmclusts/dataset.hpp"

namespace dmclusts {

struct SemiNmfResult {
    Matrix Z;          // d x K, mixed sign
    Matrix H;          // K x n, nonnegative
    double residual = 0.0; // squared Frobenius reconstruction error
    bool zero_input = false;
};

/// Alternating solver: Z by regularized least squares, H by the
/// multiplicative rule with positive/negative splits. Deterministic
/// under a fixed seed; residual is non-increasing across iterations.
SemiNmfResult seminmf_fit(const Matrix& X, int K, int max_iter, double tol, std::uint64_t seed);

/// Moore-Penrose pseudo-inverse, singular values below 1e-10 * sigma_max truncated.
Matrix pinv(const Matrix& A);

/// Elementwise (|A|+A)/2 and (|A|-A)/2.
Matrix positive_part(const Matrix& A);
Matrix negative_part(const Matrix& A);

} // namespace dmclusts

#endif
