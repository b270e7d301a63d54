// SPDX-License-Identifier: MIT
#include "tensorcs/decomp.hpp"

#include "tensorcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tensorcs {

namespace {

constexpr int kMaxSweeps = 100;

// Hestenes rotations on the columns of g (rows >= cols) until all column
// pairs are numerically orthogonal; v accumulates the rotations.
void orthogonalize_columns(Matrix& g, Matrix& v) {
    const Eigen::Index n = g.cols();
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = g.col(p).squaredNorm();
                const double beta = g.col(q).squaredNorm();
                const double gamma = g.col(p).dot(g.col(q));
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (Eigen::Index i = 0; i < g.rows(); ++i) {
                    const double gp = g(i, p);
                    const double gq = g(i, q);
                    g(i, p) = c * gp - s * gq;
                    g(i, q) = s * gp + c * gq;
                }
                for (Eigen::Index i = 0; i < v.rows(); ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) return;
    }
}

void decompose_recursive(const DenseTensor& t, std::vector<Vector>& prefix, double weight, double rank_tol,
                         std::size_t max_terms, WeakDecomposition& out) {
    if (t.order() == 1) {
        auto factors = prefix;
        factors.push_back(t.vec());
        out.terms.push_back(std::move(factors));
        out.weights.push_back(weight);
        return;
    }
    const auto s = svd(unfold(t, 0));
    if (s.rank() == 0) return;
    const double cutoff = std::max(rank_tol, 1e-10 * s.singular_values(0));
    const Dims rest(t.dims().begin() + 1, t.dims().end());
    for (std::size_t i = 0; i < s.rank() && i < max_terms; ++i) {
        const double sigma = s.singular_values(static_cast<Eigen::Index>(i));
        if (sigma <= cutoff) break;
        const double root = std::sqrt(sigma);
        prefix.push_back(root * s.left.col(static_cast<Eigen::Index>(i)));
        const Vector g = root * s.right.col(static_cast<Eigen::Index>(i));
        DenseTensor sub(rest, std::vector<double>(g.data(), g.data() + g.size()));
        decompose_recursive(sub, prefix, weight * sigma, rank_tol, max_terms, out);
        prefix.pop_back();
    }
}

Matrix pseudo_inverse(const Matrix& b) {
    const auto s = svd(b);
    Matrix pinv = Matrix::Zero(b.cols(), b.rows());
    for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
        pinv += s.right.col(i) * (s.left.col(i).transpose() / s.singular_values(i));
    }
    return pinv;
}

}  // namespace

Matrix SvdResult::reconstruct(std::size_t k) const {
    const auto r = static_cast<Eigen::Index>(std::min(k, rank()));
    return left.leftCols(r) * singular_values.head(r).asDiagonal() * right.leftCols(r).transpose();
}

SvdResult svd(const Matrix& a) {
    if (!a.allFinite()) throw InvalidArgument("svd: matrix has non-finite entries");
    const bool transposed = a.rows() < a.cols();
    Matrix g = transposed ? Matrix(a.transpose()) : a;
    Matrix v = Matrix::Identity(g.cols(), g.cols());
    orthogonalize_columns(g, v);

    const Eigen::Index n = g.cols();
    Vector norms(n);
    for (Eigen::Index j = 0; j < n; ++j) norms(j) = g.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    // Stable so equal singular values keep their column order.
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return norms(i) > norms(j); });

    const double sigma1 = n > 0 ? norms(order.front()) : 0.0;
    const double floor = static_cast<double>(std::max(a.rows(), a.cols())) *
                         std::numeric_limits<double>::epsilon() * sigma1;
    Eigen::Index r = 0;
    while (r < n && norms(order[static_cast<std::size_t>(r)]) > floor && norms(order[static_cast<std::size_t>(r)]) > 0.0) ++r;

    SvdResult out;
    out.singular_values.resize(r);
    Matrix u(g.rows(), r);
    Matrix w(v.rows(), r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto j = order[static_cast<std::size_t>(i)];
        out.singular_values(i) = norms(j);
        u.col(i) = g.col(j) / norms(j);
        w.col(i) = v.col(j);
    }
    if (transposed) {
        out.left = std::move(w);
        out.right = std::move(u);
    } else {
        out.left = std::move(u);
        out.right = std::move(w);
    }
    return out;
}

Matrix best_rank_k(const Matrix& a, std::size_t k) {
    if (k < 1) throw InvalidArgument("best_rank_k: k must be at least 1");
    const auto s = svd(a);
    if (k >= s.rank()) return a;
    return s.reconstruct(k);
}

std::size_t numerical_rank(const Matrix& a, double threshold) {
    if (threshold < 0.0) throw InvalidArgument("numerical_rank: threshold must be nonnegative");
    const auto s = svd(a);
    return static_cast<std::size_t>((s.singular_values.array() > threshold).count());
}

DenseTensor WeakDecomposition::reconstruct() const {
    DenseTensor sum(dims);
    for (const auto& term : terms) sum += outer(term);
    return sum;
}

WeakDecomposition rank_decompose_matrix(const Matrix& y, double rank_tol, std::size_t max_terms) {
    return weak_tucker_decompose(DenseTensor::from_matrix(y), rank_tol, max_terms);
}

WeakDecomposition weak_tucker_decompose(const DenseTensor& y, double rank_tol, std::size_t max_terms_per_level) {
    if (y.order() < 2) throw InvalidArgument("weak_tucker_decompose: need a tensor of order >= 2");
    if (rank_tol < 0.0) throw InvalidArgument("weak_tucker_decompose: rank_tol must be nonnegative");
    WeakDecomposition out;
    out.dims = y.dims();
    std::vector<Vector> prefix;
    decompose_recursive(y, prefix, 1.0, rank_tol, max_terms_per_level, out);
    return out;
}

DenseTensor core_tucker_coefficients(const DenseTensor& x, std::span<const Matrix> bases) {
    if (bases.size() != x.order()) throw InvalidArgument("core_tucker_coefficients: need one basis per mode");
    std::vector<Matrix> pinvs;
    pinvs.reserve(bases.size());
    for (std::size_t j = 0; j < bases.size(); ++j) {
        if (static_cast<std::size_t>(bases[j].rows()) != x.dim(j) || bases[j].cols() == 0) {
            throw InvalidArgument("core_tucker_coefficients: basis " + std::to_string(j) + " has wrong shape");
        }
        pinvs.push_back(pseudo_inverse(bases[j]));
    }
    auto xi = multi_mode_product(x, pinvs);
    const auto back = multi_mode_product(xi, bases);
    const double scale = std::max(frobenius_norm(x), std::numeric_limits<double>::min());
    if ((back.vec() - x.vec()).norm() > 1e-8 * scale) {
        throw InvalidArgument("core_tucker_coefficients: bases do not span the mode spaces of the tensor");
    }
    return xi;
}

}  // namespace tensorcs
