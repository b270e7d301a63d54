// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/tensor.hpp"

#include <cstddef>

namespace tensorcs {

/// Orthonormal DCT-II matrix D (n x n): coefficients c = D x, inverse x = D^T c.
[[nodiscard]] Matrix dct_matrix(std::size_t n);

/// Separable transform X x_1 D_1 ... x_d D_d.
[[nodiscard]] DenseTensor dct_forward(const DenseTensor& x);
/// Inverse of dct_forward.
[[nodiscard]] DenseTensor dct_inverse(const DenseTensor& coefficients);

/// Zeroes every transform coefficient outside the box [0, keep_i) anchored at
/// the low-frequency corner and transforms back. Throws InvalidArgument unless
/// keep has one entry per mode with 1 <= keep_i <= N_i.
[[nodiscard]] DenseTensor dct_sparsify(const DenseTensor& x, const Dims& keep);

/// Coefficient tensor with entries outside the keep box set to zero.
[[nodiscard]] DenseTensor mask_outside_box(const DenseTensor& coefficients, const Dims& keep);

}  // namespace tensorcs
