// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/tensor.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace tensorcs {

/// Thin SVD holding only the strictly positive singular triplets:
/// A = sum_i sigma_i u_i v_i^T with sigma sorted nonincreasing.
struct SvdResult {
    Vector singular_values;
    Matrix left;   ///< rows(A) x r, orthonormal columns u_i
    Matrix right;  ///< cols(A) x r, orthonormal columns v_i

    [[nodiscard]] std::size_t rank() const noexcept { return static_cast<std::size_t>(singular_values.size()); }
    /// sum_{i < k} sigma_i u_i v_i^T
    [[nodiscard]] Matrix reconstruct(std::size_t k = std::numeric_limits<std::size_t>::max()) const;
};

/// One-sided (Hestenes) Jacobi SVD. Deterministic for a given input.
/// Singular values below max(rows, cols) * eps * sigma_1 are treated as zero
/// and dropped. Throws InvalidArgument on non-finite entries.
[[nodiscard]] SvdResult svd(const Matrix& a);

/// A_k = sum_{i <= k} sigma_i u_i v_i^T; returns A itself when k >= rank(A).
[[nodiscard]] Matrix best_rank_k(const Matrix& a, std::size_t k);

/// Number of singular values strictly greater than `threshold`.
[[nodiscard]] std::size_t numerical_rank(const Matrix& a, double threshold);

/// sum_i b_i^(1) o ... o b_i^(d). Terms are kept in construction order and
/// summed in that order.
struct WeakDecomposition {
    Dims dims;
    std::vector<std::vector<Vector>> terms;  ///< terms[i][j] is the mode-j factor of term i
    std::vector<double> weights;             ///< product of the singular values that produced each term

    [[nodiscard]] std::size_t size() const noexcept { return terms.size(); }
    [[nodiscard]] DenseTensor reconstruct() const;
};

/// Rank decomposition of a matrix through its SVD, with factors
/// b_i^(1) = sqrt(sigma_i) u_i and b_i^(2) = sqrt(sigma_i) v_i.
[[nodiscard]] WeakDecomposition rank_decompose_matrix(const Matrix& y, double rank_tol = 0.0,
                                                      std::size_t max_terms = std::numeric_limits<std::size_t>::max());

/// Successive unfold-and-SVD decomposition of a d >= 2 tensor.
///
/// The mode-0 unfolding is split into rank-one pieces sqrt(s) u (sqrt(s) v)^T;
/// each right factor is reshaped into an order d-1 tensor over modes 1..d-1
/// and decomposed the same way, until a single mode remains. At every level
/// singular values <= max(rank_tol, 1e-10 * sigma_1) are dropped and at most
/// `max_terms_per_level` of the leading ones are kept.
[[nodiscard]] WeakDecomposition weak_tucker_decompose(
    const DenseTensor& y, double rank_tol = 0.0,
    std::size_t max_terms_per_level = std::numeric_limits<std::size_t>::max());

/// Coefficients xi with X = sum xi_{i_1..i_d} c_{i_1,1} o ... o c_{i_d,d},
/// where the c_{.,j} are the columns of bases[j]. Throws InvalidArgument if
/// the bases do not span the mode spaces of X (relative residual > 1e-8).
[[nodiscard]] DenseTensor core_tucker_coefficients(const DenseTensor& x, std::span<const Matrix> bases);

}  // namespace tensorcs
