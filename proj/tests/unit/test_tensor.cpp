// SPDX-License-Identifier: MIT
#include "fixtures.hpp"

#include "tensorcs/decomp.hpp"
#include "tensorcs/error.hpp"
#include "tensorcs/tensor.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tensorcs;
using tensorcs::fixtures::random_matrix;
using tensorcs::fixtures::random_tensor;

namespace {

double rel(const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// Direct evaluation of sum_a x[..a..] u[j, a] over the tensor entries.
DenseTensor mode_product_by_definition(const DenseTensor& x, const Matrix& u, std::size_t mode) {
    Dims out_dims = x.dims();
    out_dims[mode] = static_cast<std::size_t>(u.rows());
    DenseTensor y(out_dims);
    std::vector<std::size_t> idx(out_dims.size(), 0);
    for (std::size_t lin = 0; lin < y.size(); ++lin) {
        double acc = 0.0;
        std::vector<std::size_t> src = idx;
        for (std::size_t a = 0; a < x.dim(mode); ++a) {
            src[mode] = a;
            acc += x.at(src) * u(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(a));
        }
        y.at(idx) = acc;
        for (std::size_t i = 0; i < idx.size() && ++idx[i] == out_dims[i]; ++i) idx[i] = 0;
    }
    return y;
}

}  // namespace

TEST(DenseTensor, ConstructionAndLayout) {
    DenseTensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(x.order(), 2u);
    EXPECT_EQ(x.size(), 6u);
    EXPECT_EQ(x.at({1, 0}), 2.0);  // first mode fastest
    EXPECT_EQ(x.at({0, 1}), 3.0);
    const Matrix m = x.to_matrix();
    EXPECT_EQ(m(1, 2), 6.0);
    EXPECT_EQ(DenseTensor::from_matrix(m), x);
}

TEST(DenseTensor, RejectsBadShapes) {
    EXPECT_THROW(DenseTensor(Dims{}), InvalidArgument);
    EXPECT_THROW(DenseTensor(Dims{2, 0}), InvalidArgument);
    EXPECT_THROW(DenseTensor(Dims{2, 2}, std::vector<double>(3)), InvalidArgument);
    EXPECT_THROW(DenseTensor(Dims(9, 1)), InvalidArgument);
    DenseTensor x({2, 2});
    EXPECT_THROW((void)x.at({2, 0}), InvalidArgument);
}

TEST(ModeProduct, IdentityLeavesTensorUnchanged) {
    Rng rng(1);
    const DenseTensor x = random_tensor({2, 2}, rng);
    EXPECT_EQ(mode_product(x, Matrix::Identity(2, 2), 0), x);
    EXPECT_EQ(mode_product(x, Matrix::Identity(2, 2), 1), x);
}

TEST(ModeProduct, ColumnSums) {
    // X = [[1,2],[3,4]], U = [[1,1]] along the first mode -> [[4,6]]
    const DenseTensor x = DenseTensor::from_matrix((Matrix(2, 2) << 1, 2, 3, 4).finished());
    const DenseTensor y = mode_product(x, (Matrix(1, 2) << 1, 1).finished(), 0);
    EXPECT_EQ(y.dims(), (Dims{1, 2}));
    EXPECT_DOUBLE_EQ(y.at({0, 0}), 4.0);
    EXPECT_DOUBLE_EQ(y.at({0, 1}), 6.0);
}

TEST(ModeProduct, SequentialEqualsMatrixSandwich) {
    Rng rng(2);
    const Matrix x = random_matrix(3, 4, rng);
    const Matrix u1 = random_matrix(5, 3, rng);
    const Matrix u2 = random_matrix(2, 4, rng);
    const DenseTensor y = mode_product(mode_product(DenseTensor::from_matrix(x), u1, 0), u2, 1);
    const Matrix expect = u1 * x * u2.transpose();
    EXPECT_LT(rel(y.to_matrix(), expect), 1e-14);
}

TEST(ModeProduct, MatchesDefinitionOnThreeModes) {
    Rng rng(3);
    const DenseTensor x = random_tensor({3, 4, 2}, rng);
    for (std::size_t mode = 0; mode < 3; ++mode) {
        const Matrix u = random_matrix(5, static_cast<Eigen::Index>(x.dim(mode)), rng);
        const DenseTensor fast = mode_product(x, u, mode);
        const DenseTensor slow = mode_product_by_definition(x, u, mode);
        ASSERT_EQ(fast.dims(), slow.dims());
        EXPECT_LT((fast.vec() - slow.vec()).norm(), 1e-12 * slow.vec().norm());
    }
}

TEST(ModeProduct, RejectsMismatch) {
    DenseTensor x({2, 3});
    EXPECT_THROW((void)mode_product(x, Matrix::Zero(2, 3), 0), InvalidArgument);
    EXPECT_THROW((void)mode_product(x, Matrix::Zero(2, 3), 2), InvalidArgument);
}

TEST(ModeProduct, LinearAndCommuting) {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseTensor x1 = random_tensor({3, 4, 2}, rng);
        const DenseTensor x2 = random_tensor({3, 4, 2}, rng);
        const Matrix u = random_matrix(2, 4, rng);
        const Matrix v = random_matrix(2, 4, rng);
        const Matrix w = random_matrix(5, 2, rng);
        const double a = rng.gaussian();
        const double b = rng.gaussian();
        const DenseTensor lhs = mode_product(a * x1 + b * x2, u, 1);
        const DenseTensor rhs = a * mode_product(x1, u, 1) + b * mode_product(x2, u, 1);
        EXPECT_LT((lhs.vec() - rhs.vec()).norm(), 1e-12 * rhs.vec().norm());
        const DenseTensor in_u = mode_product(x1, a * u + b * v, 1);
        const DenseTensor sum_u = a * mode_product(x1, u, 1) + b * mode_product(x1, v, 1);
        EXPECT_LT((in_u.vec() - sum_u.vec()).norm(), 1e-12 * sum_u.vec().norm());
        const DenseTensor ij = mode_product(mode_product(x1, u, 1), w, 2);
        const DenseTensor ji = mode_product(mode_product(x1, w, 2), u, 1);
        EXPECT_LT((ij.vec() - ji.vec()).norm(), 1e-12 * ij.vec().norm());
    }
}

TEST(Unfold, WorkedExample) {
    // X[i1,i2,i3] = i1 + 2(i2-1) + 4(i3-1), 1-based
    DenseTensor x({2, 2, 2});
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) x.at({i, j, k}) = static_cast<double>(i + 1 + 2 * j + 4 * k);
        }
    }
    const Matrix expect = (Matrix(2, 4) << 1, 3, 5, 7, 2, 4, 6, 8).finished();
    EXPECT_EQ(unfold(x, 0), expect);
    EXPECT_EQ(fold(expect, 0, {2, 2, 2}), x);
}

TEST(Unfold, OneModeTensorIsAColumn) {
    const DenseTensor x({3}, {1, 2, 3});
    const Matrix m = unfold(x, 0);
    EXPECT_EQ(m.rows(), 3);
    EXPECT_EQ(m.cols(), 1);
    EXPECT_EQ(m(2, 0), 3.0);
}

TEST(Unfold, RoundTripEveryMode) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor x = random_tensor({3, 4, 2, 2}, rng);
        for (std::size_t i = 0; i < x.order(); ++i) EXPECT_EQ(fold(unfold(x, i), i, x.dims()), x);
    }
}

TEST(Unfold, FoldRejectsWrongShape) {
    EXPECT_THROW((void)fold(Matrix::Zero(2, 3), 0, {2, 2, 2}), InvalidArgument);
    EXPECT_THROW((void)unfold(DenseTensor({2, 2}), 2), InvalidArgument);
}

TEST(Kronecker, BlockStructure) {
    const Matrix b = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    const Matrix k = kronecker(Matrix::Identity(2, 2), b);
    Matrix expect = Matrix::Zero(4, 4);
    expect.topLeftCorner(2, 2) = b;
    expect.bottomRightCorner(2, 2) = b;
    EXPECT_EQ(k, expect);
    EXPECT_EQ(kronecker((Matrix(1, 1) << 2).finished(), b), 2 * b);
}

TEST(Kronecker, UnfoldingIdentity) {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor x = random_tensor({3, 3, 3}, rng);
        std::vector<Matrix> us;
        for (int i = 0; i < 3; ++i) us.push_back(random_matrix(2 + i, 3, rng));
        const DenseTensor y = multi_mode_product(x, us);
        for (std::size_t i = 0; i < 3; ++i) {
            // remaining factors, highest mode outermost
            Matrix chain = Matrix::Identity(1, 1);
            for (std::size_t j = 0; j < 3; ++j) {
                if (j != i) chain = kronecker(us[j], chain);
            }
            const Matrix rhs = us[i] * unfold(x, i) * chain.transpose();
            EXPECT_LT(rel(unfold(y, i), rhs), 1e-10);
        }
    }
}

TEST(Outer, MatchesProducts) {
    Rng rng(7);
    const Vector u = Vector::Random(3);
    const Vector v = Vector::Random(4);
    const std::vector<Vector> uv{u, v};
    EXPECT_LT(rel(outer(uv).to_matrix(), u * v.transpose()), 1e-15);

    std::vector<Vector> basis{Vector::Unit(2, 0), Vector::Unit(3, 1), Vector::Unit(4, 2)};
    const DenseTensor e = outer(basis);
    EXPECT_EQ(e.at({0, 1, 2}), 1.0);
    EXPECT_EQ(count_nonzeros(e), 1u);

    const std::vector<Vector> three{Vector::Random(3), Vector::Random(2), Vector::Random(5)};
    EXPECT_NEAR(frobenius_norm(outer(three)), three[0].norm() * three[1].norm() * three[2].norm(), 1e-12);
    EXPECT_THROW((void)outer(std::vector<Vector>{}), InvalidArgument);
}

TEST(Norms, SmallCases) {
    EXPECT_DOUBLE_EQ(l2_norm((Vector(2) << 3, 4).finished()), 5.0);
    EXPECT_DOUBLE_EQ(l1_norm((Vector(3) << 1, -2, 3).finished()), 6.0);
    EXPECT_EQ(count_nonzeros((Vector(4) << 0, 1e-12, -2, 1e-3).finished()), 2u);
}

TEST(Norms, FrobeniusFromSingularValues) {
    Rng rng(8);
    const Matrix a = random_matrix(4, 3, rng);
    const auto s = svd(a);
    EXPECT_NEAR(frobenius_norm(DenseTensor::from_matrix(a)), s.singular_values.norm(), 1e-12);
}

TEST(RelativeError, Basic) {
    const DenseTensor a({2}, {1, 0});
    const DenseTensor b({2}, {1, 1});
    EXPECT_NEAR(relative_error(a, b), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW((void)relative_error(a, DenseTensor({3})), InvalidArgument);
}
