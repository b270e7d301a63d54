// SPDX-License-Identifier: MIT
#include "tensorcs/dct.hpp"

#include "tensorcs/error.hpp"

#include <cmath>
#include <numbers>

namespace tensorcs {

namespace {

std::vector<Matrix> per_mode_dct(const Dims& dims, bool transpose) {
    std::vector<Matrix> ds;
    ds.reserve(dims.size());
    for (auto n : dims) {
        Matrix d = dct_matrix(n);
        if (transpose) d.transposeInPlace();
        ds.push_back(std::move(d));
    }
    return ds;
}

}  // namespace

Matrix dct_matrix(std::size_t n) {
    if (n == 0) throw InvalidArgument("dct_matrix: n must be >= 1");
    const auto nn = static_cast<Eigen::Index>(n);
    const double nd = static_cast<double>(n);
    Matrix d(nn, nn);
    for (Eigen::Index k = 0; k < nn; ++k) {
        const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / nd);
        for (Eigen::Index j = 0; j < nn; ++j) {
            d(k, j) = alpha * std::cos(std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) *
                                       static_cast<double>(k) / (2.0 * nd));
        }
    }
    return d;
}

DenseTensor dct_forward(const DenseTensor& x) {
    return multi_mode_product(x, per_mode_dct(x.dims(), false));
}

DenseTensor dct_inverse(const DenseTensor& coefficients) {
    return multi_mode_product(coefficients, per_mode_dct(coefficients.dims(), true));
}

DenseTensor mask_outside_box(const DenseTensor& coefficients, const Dims& keep) {
    const auto& dims = coefficients.dims();
    if (keep.size() != dims.size()) throw InvalidArgument("keep box needs one extent per mode");
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (keep[i] < 1 || keep[i] > dims[i]) {
            throw InvalidArgument("keep extent " + std::to_string(keep[i]) + " outside [1, " +
                                  std::to_string(dims[i]) + "] for mode " + std::to_string(i));
        }
    }
    DenseTensor out = coefficients;
    auto data = out.data();
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t lin = 0; lin < data.size(); ++lin) {
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (idx[i] >= keep[i]) {
                data[lin] = 0.0;
                break;
            }
        }
        for (std::size_t i = 0; i < dims.size() && ++idx[i] == dims[i]; ++i) idx[i] = 0;
    }
    return out;
}

DenseTensor dct_sparsify(const DenseTensor& x, const Dims& keep) {
    return dct_inverse(mask_outside_box(dct_forward(x), keep));
}

}  // namespace tensorcs
