// SPDX-License-Identifier: MIT
#include "tensorcs/tensor.hpp"

#include "tensorcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tensorcs {

namespace {

constexpr std::size_t kMaxOrder = 8;

void require_same_dims(const DenseTensor& a, const DenseTensor& b, const char* what) {
    if (a.dims() != b.dims()) {
        throw InvalidArgument(std::string(what) + ": tensor dimensions differ");
    }
}

void require_mode(const Dims& dims, std::size_t mode) {
    if (mode >= dims.size()) {
        throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for order " +
                              std::to_string(dims.size()));
    }
}

// Splits a tensor around `mode` into (lower, extent, upper) blocks.
struct ModeSplit {
    std::size_t lower = 1;
    std::size_t extent = 1;
    std::size_t upper = 1;
};

ModeSplit split_at(const Dims& dims, std::size_t mode) {
    ModeSplit s;
    for (std::size_t j = 0; j < mode; ++j) s.lower *= dims[j];
    s.extent = dims[mode];
    for (std::size_t j = mode + 1; j < dims.size(); ++j) s.upper *= dims[j];
    return s;
}

}  // namespace

std::size_t element_count(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void validate_dims(const Dims& dims) {
    if (dims.empty()) throw InvalidArgument("tensor must have at least one mode");
    if (dims.size() > kMaxOrder) throw InvalidArgument("tensor order above 8 is not supported");
    for (auto n : dims) {
        if (n == 0) throw InvalidArgument("tensor extents must be positive");
    }
}

DenseTensor::DenseTensor() : dims_{1}, data_(1, 0.0) {}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
    validate_dims(dims_);
    data_.assign(element_count(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    validate_dims(dims_);
    if (data_.size() != element_count(dims_)) {
        throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                              " does not match product of dims " +
                              std::to_string(element_count(dims_)));
    }
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
    if (m.size() == 0) throw InvalidArgument("empty matrix");
    std::vector<double> data(m.data(), m.data() + m.size());
    return DenseTensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                       std::move(data));
}

DenseTensor DenseTensor::from_vector(const Vector& v) {
    if (v.size() == 0) throw InvalidArgument("empty vector");
    return DenseTensor({static_cast<std::size_t>(v.size())},
                       std::vector<double>(v.data(), v.data() + v.size()));
}

Matrix DenseTensor::to_matrix() const {
    if (order() > 2) throw InvalidArgument("to_matrix requires order <= 2");
    const auto rows = static_cast<Eigen::Index>(dims_[0]);
    const auto cols = static_cast<Eigen::Index>(order() == 2 ? dims_[1] : 1);
    return Eigen::Map<const Matrix>(data_.data(), rows, cols);
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) throw InvalidArgument("index arity does not match tensor order");
    std::size_t linear = 0;
    std::size_t stride = 1;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
        if (index[j] >= dims_[j]) throw InvalidArgument("tensor index out of range");
        linear += index[j] * stride;
        stride *= dims_[j];
    }
    return linear;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
    require_same_dims(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
    require_same_dims(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double alpha) {
    for (auto& v : data_) v *= alpha;
    return *this;
}

DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs) { return lhs += rhs; }
DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs) { return lhs -= rhs; }
DenseTensor operator*(double alpha, DenseTensor x) { return x *= alpha; }

DenseTensor mode_product(const DenseTensor& x, const Matrix& u, std::size_t mode) {
    require_mode(x.dims(), mode);
    if (static_cast<std::size_t>(u.cols()) != x.dim(mode)) {
        throw InvalidArgument("mode_product: matrix has " + std::to_string(u.cols()) +
                              " columns but mode " + std::to_string(mode) + " has extent " +
                              std::to_string(x.dim(mode)));
    }
    if (u.rows() == 0) throw InvalidArgument("mode_product: matrix has no rows");

    const auto s = split_at(x.dims(), mode);
    Dims out_dims = x.dims();
    out_dims[mode] = static_cast<std::size_t>(u.rows());
    DenseTensor out(out_dims);

    const auto L = static_cast<Eigen::Index>(s.lower);
    const auto n = static_cast<Eigen::Index>(s.extent);
    const auto J = u.rows();
    // For each upper slab, the (lower x extent) block times U^T.
    for (std::size_t r = 0; r < s.upper; ++r) {
        Eigen::Map<const Matrix> in_block(x.data().data() + r * s.lower * s.extent, L, n);
        Eigen::Map<Matrix> out_block(out.data().data() + r * s.lower * static_cast<std::size_t>(J), L, J);
        out_block.noalias() = in_block * u.transpose();
    }
    return out;
}

DenseTensor multi_mode_product(const DenseTensor& x, std::span<const Matrix> us) {
    if (us.size() != x.order()) {
        throw InvalidArgument("multi_mode_product: need one matrix per mode");
    }
    DenseTensor y = x;
    for (std::size_t i = 0; i < us.size(); ++i) y = mode_product(y, us[i], i);
    return y;
}

Matrix unfold(const DenseTensor& x, std::size_t mode) {
    require_mode(x.dims(), mode);
    const auto s = split_at(x.dims(), mode);
    Matrix m(static_cast<Eigen::Index>(s.extent), static_cast<Eigen::Index>(s.lower * s.upper));
    const double* src = x.data().data();
    for (std::size_t r = 0; r < s.upper; ++r) {
        for (std::size_t a = 0; a < s.extent; ++a) {
            for (std::size_t l = 0; l < s.lower; ++l) {
                m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(l + s.lower * r)) =
                    src[l + s.lower * (a + s.extent * r)];
            }
        }
    }
    return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Dims& dims) {
    validate_dims(dims);
    require_mode(dims, mode);
    const auto s = split_at(dims, mode);
    if (static_cast<std::size_t>(m.rows()) != s.extent ||
        static_cast<std::size_t>(m.cols()) != s.lower * s.upper) {
        throw InvalidArgument("fold: matrix shape " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + " inconsistent with dims for mode " +
                              std::to_string(mode));
    }
    DenseTensor x(dims);
    double* dst = x.data().data();
    for (std::size_t r = 0; r < s.upper; ++r) {
        for (std::size_t a = 0; a < s.extent; ++a) {
            for (std::size_t l = 0; l < s.lower; ++l) {
                dst[l + s.lower * (a + s.extent * r)] =
                    m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(l + s.lower * r));
            }
        }
    }
    return x;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

Matrix kronecker_chain(std::span<const Matrix> us, std::span<const std::size_t> skip) {
    Matrix acc = Matrix::Identity(1, 1);
    // Highest mode is the outermost (slowest varying) factor.
    for (std::size_t j = us.size(); j-- > 0;) {
        if (std::find(skip.begin(), skip.end(), j) != skip.end()) continue;
        acc = kronecker(acc, us[j]);
    }
    return acc;
}

DenseTensor outer(std::span<const Vector> vectors) {
    if (vectors.empty()) throw InvalidArgument("outer: need at least one vector");
    Dims dims;
    for (const auto& v : vectors) dims.push_back(static_cast<std::size_t>(v.size()));
    validate_dims(dims);

    std::vector<double> data{1.0};
    std::size_t block = 1;
    for (const auto& v : vectors) {
        std::vector<double> next(block * static_cast<std::size_t>(v.size()));
        for (Eigen::Index a = 0; a < v.size(); ++a) {
            for (std::size_t l = 0; l < block; ++l) {
                next[l + block * static_cast<std::size_t>(a)] = data[l] * v(a);
            }
        }
        block = next.size();
        data = std::move(next);
    }
    return DenseTensor(std::move(dims), std::move(data));
}

double frobenius_norm(const DenseTensor& x) { return x.vec().norm(); }

double l1_norm(const Vector& v) { return v.lpNorm<1>(); }

double l2_norm(const Vector& v) { return v.norm(); }

std::size_t count_nonzeros(const DenseTensor& x, double tol) {
    return static_cast<std::size_t>(
        std::count_if(x.data().begin(), x.data().end(), [tol](double v) { return std::abs(v) > tol; }));
}

std::size_t count_nonzeros(const Vector& v, double tol) {
    return static_cast<std::size_t>((v.array().abs() > tol).count());
}

double relative_error(const DenseTensor& estimate, const DenseTensor& reference) {
    require_same_dims(estimate, reference, "relative_error");
    const double denom = std::max(frobenius_norm(reference), std::numeric_limits<double>::min());
    return (estimate.vec() - reference.vec()).norm() / denom;
}

}  // namespace tensorcs
