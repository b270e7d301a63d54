// SPDX-License-Identifier: MIT
// Random instances shared by the unit and acceptance tests.
#pragma once

#include "tensorcs/rng.hpp"
#include "tensorcs/sensing.hpp"
#include "tensorcs/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tensorcs::fixtures {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Matrix a(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = rng.gaussian();
    }
    return a;
}

inline DenseTensor random_tensor(const Dims& dims, Rng& rng) {
    DenseTensor x(dims);
    for (auto& v : x.data()) v = rng.gaussian();
    return x;
}

// k distinct positions out of n, sorted.
inline std::vector<std::size_t> random_support(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    idx.resize(k);
    std::ranges::sort(idx);
    return idx;
}

// Nonzeros are +-(1 + |g|), away from zero.
inline double spike(Rng& rng) {
    const double g = 1.0 + std::abs(rng.gaussian());
    return rng.coin() ? g : -g;
}

inline Vector random_sparse_vector(std::size_t n, std::size_t k, Rng& rng) {
    Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
    for (auto i : random_support(n, k, rng)) x(static_cast<Eigen::Index>(i)) = spike(rng);
    return x;
}

inline DenseTensor random_sparse_tensor(const Dims& dims, std::size_t k, Rng& rng) {
    DenseTensor x(dims);
    auto data = x.data();
    for (auto i : random_support(data.size(), k, rng)) data[i] = spike(rng);
    return x;
}

inline MeasurementEnsemble identity_ensemble(const Dims& dims) {
    std::vector<Matrix> us;
    for (auto n : dims) us.push_back(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    return MeasurementEnsemble::from_matrices(std::move(us));
}

}  // namespace tensorcs::fixtures
