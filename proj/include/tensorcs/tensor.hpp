// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace tensorcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

/// Dense real tensor of order d >= 1.
///
/// Entries are stored in a flat array with the first mode varying fastest
/// (column-major generalised to d modes), so that a 2-mode tensor has the
/// same memory layout as an Eigen column-major matrix and the flat data is
/// vec(X) in the usual sense. Modes are addressed 0-based throughout the API.
class DenseTensor {
public:
    /// A 1-mode tensor holding a single zero.
    DenseTensor();
    /// Zero tensor of the given dimensions.
    explicit DenseTensor(Dims dims);
    DenseTensor(Dims dims, std::vector<double> data);

    static DenseTensor from_matrix(const Matrix& m);
    static DenseTensor from_vector(const Vector& v);

    /// Copy into a matrix. Order-1 tensors become a column.
    [[nodiscard]] Matrix to_matrix() const;

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
    [[nodiscard]] std::size_t order() const noexcept { return dims_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    [[nodiscard]] Eigen::Map<const Vector> vec() const {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }
    [[nodiscard]] Eigen::Map<Vector> vec() {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }

    [[nodiscard]] std::size_t linear_index(std::span<const std::size_t> index) const;
    [[nodiscard]] double& at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
    [[nodiscard]] double at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }
    double& at(std::initializer_list<std::size_t> index) {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }
    [[nodiscard]] double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(double alpha);

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Dims dims_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs);
DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs);
DenseTensor operator*(double alpha, DenseTensor x);

/// Product of the entries of a dimension vector.
[[nodiscard]] std::size_t element_count(const Dims& dims);

/// Throws InvalidArgument unless d >= 1 and every extent is >= 1.
void validate_dims(const Dims& dims);

/// X x_mode U: contracts mode `mode` of X with the columns of U.
/// The result has U.rows() in place of X.dim(mode).
[[nodiscard]] DenseTensor mode_product(const DenseTensor& x, const Matrix& u, std::size_t mode);

/// X x_1 U_1 x_2 ... x_d U_d, one matrix per mode.
[[nodiscard]] DenseTensor multi_mode_product(const DenseTensor& x, std::span<const Matrix> us);

/// Mode-`mode` unfolding: an N_mode x prod_{j != mode} N_j matrix whose
/// columns are the mode fibres. Remaining modes index the columns in
/// ascending order with the lowest mode varying fastest, which makes
///   unfold(X x_1 U_1 ... x_d U_d, i) == U_i unfold(X, i) (U_d (x) ... (x) U_1)^T
/// hold with U_i omitted from the Kronecker chain.
[[nodiscard]] Matrix unfold(const DenseTensor& x, std::size_t mode);

/// Inverse of unfold for a tensor of dimensions `dims`.
[[nodiscard]] DenseTensor fold(const Matrix& m, std::size_t mode, const Dims& dims);

[[nodiscard]] Matrix kronecker(const Matrix& a, const Matrix& b);

/// U_d (x) ... (x) U_1 for us = {U_1, ..., U_d}; maps vec(X) to vec(X x_1 U_1 ... x_d U_d).
/// Indices in `skip` are left out of the chain.
[[nodiscard]] Matrix kronecker_chain(std::span<const Matrix> us, std::span<const std::size_t> skip = {});

/// Rank-one tensor v_1 o v_2 o ... o v_d.
[[nodiscard]] DenseTensor outer(std::span<const Vector> vectors);

[[nodiscard]] double frobenius_norm(const DenseTensor& x);
[[nodiscard]] double l1_norm(const Vector& v);
[[nodiscard]] double l2_norm(const Vector& v);
[[nodiscard]] std::size_t count_nonzeros(const DenseTensor& x, double tol = 1e-9);
[[nodiscard]] std::size_t count_nonzeros(const Vector& v, double tol = 1e-9);

/// ||a - b||_F / max(||b||_F, tiny); dims must agree.
[[nodiscard]] double relative_error(const DenseTensor& estimate, const DenseTensor& reference);

}  // namespace tensorcs
