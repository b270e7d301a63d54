// SPDX-License-Identifier: MIT
#include "fixtures.hpp"

#include "tensorcs/decomp.hpp"
#include "tensorcs/error.hpp"
#include "tensorcs/recovery.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tensorcs;
using namespace tensorcs::fixtures;

namespace {

Matrix nsp_matrix(Eigen::Index m, Eigen::Index n, std::size_t k, Rng& rng) {
    while (true) {
        const Matrix a = random_matrix(m, n, rng) / std::sqrt(static_cast<double>(m));
        if (check_nsp_exhaustive(a, k)) return a;
    }
}

MeasurementEnsemble nsp_ensemble(const Dims& dims, Eigen::Index m, std::size_t k, Rng& rng) {
    std::vector<Matrix> us;
    for (auto n : dims) us.push_back(nsp_matrix(m, static_cast<Eigen::Index>(n), k, rng));
    return MeasurementEnsemble::from_matrices(std::move(us));
}

RecoveryProblem problem_for(const DenseTensor& x, const MeasurementEnsemble& e, std::size_t k) {
    RecoveryProblem p;
    p.observation = sample(x, e);
    p.ensemble = e;
    p.k = k;
    p.threads = 1;
    return p;
}

}  // namespace

TEST(MethodNames, RoundTrip) {
    for (auto m : {Method::csm_s, Method::csm_p, Method::gtcs_s, Method::gtcs_p, Method::kcs}) {
        EXPECT_EQ(method_from_string(to_string(m)), m);
    }
    EXPECT_THROW((void)method_from_string("omp"), InvalidArgument);
}

TEST(Recovery, IdentityEnsemblesAreExact) {
    Rng rng(1);
    const DenseTensor x2 = random_sparse_tensor({5, 6}, 3, rng);
    const auto p2 = problem_for(x2, identity_ensemble(x2.dims()), 3);
    EXPECT_EQ(csm_s(p2).estimate, x2);
    EXPECT_LT(relative_error(csm_p(p2).estimate, x2), 1e-12);
    EXPECT_EQ(kcs_recover(p2).estimate, x2);

    const DenseTensor x3 = random_sparse_tensor({3, 4, 5}, 4, rng);
    const auto p3 = problem_for(x3, identity_ensemble(x3.dims()), 4);
    EXPECT_EQ(gtcs_s(p3).estimate, x3);
    EXPECT_LT(relative_error(gtcs_p(p3).estimate, x3), 1e-12);
}

TEST(Recovery, MatrixMethodsOnNspInstances) {
    Rng rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto e = nsp_ensemble({12, 12}, 8, 2, rng);
        const DenseTensor x = random_sparse_tensor({12, 12}, 2, rng);
        const auto p = problem_for(x, e, 2);
        const auto s = csm_s(p);
        const auto par = csm_p(p);
        const auto k = kcs_recover(p);
        EXPECT_LT(relative_error(s.estimate, x), 1e-6);
        EXPECT_LT(relative_error(par.estimate, x), 1e-6);
        EXPECT_LT(relative_error(k.estimate, x), 1e-6);
        EXPECT_LT(relative_error(s.estimate, par.estimate), 1e-5);
        EXPECT_EQ(s.stages.size(), 2u);
        EXPECT_EQ(s.stages[0].subproblem_count, 8u);
        EXPECT_EQ(s.stages[1].subproblem_count, 12u);
        EXPECT_LE(par.term_count, 2u);
    }
}

TEST(Recovery, TensorMethodsOnNspInstances) {
    Rng rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const auto e = nsp_ensemble({8, 8, 8}, 6, 2, rng);
        const DenseTensor x = random_sparse_tensor({8, 8, 8}, 2, rng);
        const auto p = problem_for(x, e, 2);
        const auto s = gtcs_s(p);
        const auto par = gtcs_p(p);
        const auto k = kcs_recover(p);
        EXPECT_LT(relative_error(s.estimate, x), 1e-6);
        EXPECT_LT(relative_error(par.estimate, x), 1e-6);
        EXPECT_LT(relative_error(k.estimate, s.estimate), 1e-5);
        EXPECT_LT(relative_error(par.estimate, s.estimate), 1e-5);
        EXPECT_LE(par.term_count, 4u);
    }
}

TEST(Recovery, GtcsSOnMatrixEqualsCsmS) {
    Rng rng(4);
    const auto e = generate_ensemble({12, 12}, {8, 8}, Distribution::gaussian, 5);
    const DenseTensor x = random_sparse_tensor({12, 12}, 3, rng);
    const auto p = problem_for(x, e, 3);
    EXPECT_EQ(gtcs_s(p).estimate, csm_s(p).estimate);
}

TEST(Recovery, RankOneSparseMatrix) {
    Rng rng(5);
    const auto e = nsp_ensemble({10, 10}, 6, 1, rng);
    const Vector u = random_sparse_vector(10, 1, rng);
    const Vector v = random_sparse_vector(10, 1, rng);
    const DenseTensor x = DenseTensor::from_matrix(u * v.transpose());
    const auto r = csm_p(problem_for(x, e, 1));
    EXPECT_EQ(r.term_count, 1u);
    EXPECT_LT(relative_error(r.estimate, x), 1e-6);
}

TEST(Recovery, RankOneSparseTensor) {
    Rng rng(6);
    const auto e = nsp_ensemble({8, 8, 8}, 6, 2, rng);
    const std::vector<Vector> f{random_sparse_vector(8, 2, rng), random_sparse_vector(8, 2, rng),
                                random_sparse_vector(8, 1, rng)};
    const DenseTensor x = outer(f);
    const auto r = gtcs_p(problem_for(x, e, 4));
    EXPECT_EQ(r.term_count, 1u);
    EXPECT_LT(relative_error(r.estimate, x), 1e-6);
}

TEST(Recovery, ZeroSignal) {
    Rng rng(7);
    const auto e = generate_ensemble({6, 6}, {4, 4}, Distribution::gaussian, 8);
    const auto r = csm_p(problem_for(DenseTensor({6, 6}), e, 1));
    EXPECT_EQ(r.term_count, 0u);
    EXPECT_EQ(r.estimate, DenseTensor({6, 6}));
}

TEST(Recovery, RowSparsityRelaxation) {
    // four nonzeros in distinct rows and columns: every row of X is 1-sparse, so
    // the second stage only needs an NSP_1 matrix while the first stage is invertible
    Rng rng(8);
    const Matrix u1 = random_matrix(12, 12, rng);
    const Matrix u2 = nsp_matrix(6, 12, 1, rng);
    const auto e = MeasurementEnsemble::from_matrices({u1, u2});
    DenseTensor x({12, 12});
    const std::vector<std::size_t> cols = random_support(12, 4, rng);
    for (std::size_t i = 0; i < 4; ++i) x.at({3 * i, cols[i]}) = spike(rng);
    auto p = problem_for(x, e, 4);
    p.per_mode_k = {4, 1};
    EXPECT_LT(relative_error(csm_s(p).estimate, x), 1e-6);
}

TEST(Recovery, KBoundOverRandomInstances) {
    Rng rng(9);
    const auto e = generate_ensemble({6, 6, 6}, {6, 6, 6}, Distribution::gaussian, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
        const DenseTensor x = random_sparse_tensor({6, 6, 6}, k, rng);
        const auto dec = weak_tucker_decompose(sample(x, e));
        EXPECT_LE(dec.size(), k * k);
    }
}

TEST(Recovery, ParallelIsBitIdenticalAcrossThreadCounts) {
    Rng rng(11);
    const auto e = generate_ensemble({8, 8, 8}, {6, 6, 6}, Distribution::gaussian, 12);
    const DenseTensor x = random_sparse_tensor({8, 8, 8}, 3, rng);
    auto p = problem_for(x, e, 3);
    p.threads = 1;
    const auto one = gtcs_p(p);
    p.threads = 4;
    const auto four = gtcs_p(p);
    EXPECT_EQ(one.estimate, four.estimate);
    const auto serial4 = gtcs_s(p);
    p.threads = 1;
    EXPECT_EQ(gtcs_s(p).estimate, serial4.estimate);
}

TEST(Recovery, ContractChecks) {
    const auto e = generate_ensemble({6, 6}, {4, 4}, Distribution::gaussian, 13);
    RecoveryProblem p;
    p.ensemble = e;
    p.observation = DenseTensor({4, 5});
    EXPECT_THROW((void)csm_s(p), ContractMismatch);
    p.observation = DenseTensor({4, 4});
    p.epsilon = 0.1;
    EXPECT_THROW((void)csm_s(p), InvalidArgument);
    p.epsilon = 0.0;
    EXPECT_THROW((void)csm_s_noisy(p), InvalidArgument);
    p.k = 0;
    EXPECT_THROW((void)csm_s(p), InvalidArgument);
    p.k = 1;
    p.ensemble = generate_ensemble({6, 6, 6}, {4, 4, 4}, Distribution::gaussian, 13);
    p.observation = DenseTensor({4, 4, 4});
    EXPECT_THROW((void)csm_s(p), ContractMismatch);
}

TEST(Recovery, InfeasibleStageReportsMode) {
    Rng rng(14);
    Matrix u0 = random_matrix(4, 6, rng);
    u0.row(3).setZero();  // range misses the last coordinate
    const auto e = MeasurementEnsemble::from_matrices({u0, random_matrix(4, 6, rng)});
    RecoveryProblem p;
    p.ensemble = e;
    p.observation = random_tensor({4, 4}, rng);
    p.threads = 1;
    try {
        (void)gtcs_s(p);
        FAIL() << "expected a stage failure";
    } catch (const StageFailure& f) {
        EXPECT_EQ(f.mode(), 0u);
    }
    EXPECT_THROW((void)gtcs_p(p), StageFailure);
}

TEST(Kcs, MemoryBudget) {
    EXPECT_GT(kcs_required_bytes({24, 24, 24}, {20, 20, 20}), std::size_t{512} << 20);
    Rng rng(15);
    const auto e = generate_ensemble({8, 8}, {6, 6}, Distribution::gaussian, 16);
    auto p = problem_for(random_sparse_tensor({8, 8}, 2, rng), e, 2);
    p.memory_budget_bytes = kcs_required_bytes({8, 8}, {6, 6}) - 1;
    EXPECT_THROW((void)kcs_recover(p), BudgetExceeded);
    p.memory_budget_bytes = kcs_required_bytes({8, 8}, {6, 6});
    EXPECT_NO_THROW((void)kcs_recover(p));
}

TEST(Noisy, TinyEpsilonMatchesNoiseless) {
    Rng rng(17);
    const auto e = nsp_ensemble({12, 12}, 8, 2, rng);
    const DenseTensor x = random_sparse_tensor({12, 12}, 2, rng);
    auto p = problem_for(x, e, 2);
    const auto clean_s = csm_s(p);
    const auto clean_p = csm_p(p);
    p.epsilon = 1e-9 * frobenius_norm(p.observation);
    EXPECT_LT(relative_error(csm_s_noisy(p).estimate, clean_s.estimate), 1e-5);
    EXPECT_LT(relative_error(csm_p_noisy(p).estimate, clean_p.estimate), 1e-5);

    const auto e3 = nsp_ensemble({8, 8, 8}, 6, 2, rng);
    const DenseTensor x3 = random_sparse_tensor({8, 8, 8}, 2, rng);
    auto p3 = problem_for(x3, e3, 2);
    const auto clean3 = gtcs_p(p3);
    p3.epsilon = 1e-9 * frobenius_norm(p3.observation);
    EXPECT_LT(relative_error(gtcs_s_noisy(p3).estimate, clean3.estimate), 1e-5);
    EXPECT_LT(relative_error(gtcs_p_noisy(p3).estimate, clean3.estimate), 1e-5);
}

TEST(Noisy, ReportCarriesBoundAndStageTolerances) {
    Rng rng(18);
    const auto e = generate_ensemble({12, 12}, {8, 8}, Distribution::gaussian, 19);
    const DenseTensor x = random_sparse_tensor({12, 12}, 3, rng);
    auto p = problem_for(x, e, 3);
    const auto noisy = add_noise(p.observation, 0.01, 20);
    p.observation = noisy.observation;
    p.epsilon = noisy.epsilon;
    p.delta_2k = 0.2;
    const auto r = csm_s_noisy(p);
    ASSERT_TRUE(r.error_bound.has_value());
    const double c2 = c2_constant(0.2);
    EXPECT_NEAR(*r.error_bound, c2 * c2 * p.epsilon, 1e-12 * c2 * c2 * p.epsilon);
    ASSERT_EQ(r.stages.size(), 2u);
    // stage 1: eps / sqrt(m_2); stage 2: C2 eps / sqrt(N_1)
    EXPECT_NEAR(r.stages[0].tolerance, p.epsilon / std::sqrt(8.0) * (r.stages[0].relaxed ? std::sqrt(2.0) : 1.0),
                1e-12);
    EXPECT_NEAR(r.stages[1].tolerance, c2 * p.epsilon / std::sqrt(12.0) * (r.stages[1].relaxed ? std::sqrt(2.0) : 1.0),
                1e-12);
    p.delta_2k.reset();
    EXPECT_FALSE(csm_s_noisy(p).error_bound.has_value());
}

TEST(Noisy, MatrixTruncationOfSmallSingularValues) {
    Rng rng(21);
    const auto e = MeasurementEnsemble::from_matrices({Matrix::Identity(6, 6), Matrix::Identity(6, 6)});
    DenseTensor x({6, 6});
    x.at({0, 0}) = 10.0;
    x.at({3, 4}) = 0.01;
    RecoveryProblem p = problem_for(x, e, 2);
    p.epsilon = 0.1;  // eps / sqrt(k) = 0.0707 sits between the two singular values
    const auto r = csm_p_noisy(p);
    EXPECT_EQ(r.term_count, 2u);
    EXPECT_EQ(r.kept_terms, 1u);
    EXPECT_TRUE(r.truncated);
    EXPECT_LE(frobenius_norm(r.estimate - x), c2_constant(0.0) * c2_constant(0.0) * p.epsilon);
}

TEST(Noisy, KcsUsesBpdn) {
    Rng rng(22);
    const auto e = generate_ensemble({6, 6}, {5, 5}, Distribution::gaussian, 23);
    auto p = problem_for(random_sparse_tensor({6, 6}, 2, rng), e, 2);
    const auto noisy = add_noise(p.observation, 0.01, 24);
    p.observation = noisy.observation;
    p.epsilon = noisy.epsilon;
    const auto r = kcs_recover(p);
    EXPECT_EQ(r.method, "kcs_noisy");
    EXPECT_LE(frobenius_norm(sample(r.estimate, e) - p.observation), p.epsilon * (1.0 + 1e-6));
}

TEST(Dispatch, RecoverSelectsNoisyVariant) {
    Rng rng(25);
    const auto e = generate_ensemble({6, 6, 6}, {5, 5, 5}, Distribution::gaussian, 26);
    auto p = problem_for(random_sparse_tensor({6, 6, 6}, 1, rng), e, 1);
    EXPECT_EQ(recover(Method::gtcs_s, p).method, "gtcs_s");
    p.epsilon = 1e-3;
    p.delta_2k = 0.2;
    const auto r = recover(Method::gtcs_s, p);
    EXPECT_EQ(r.method, "gtcs_s_noisy");
    ASSERT_TRUE(r.error_bound.has_value());
    EXPECT_NEAR(*r.error_bound, std::pow(c2_constant(0.2), 3) * 1e-3, 1e-12);
}

TEST(RankPreservation, Basics) {
    Rng rng(27);
    const auto e = nsp_ensemble({12, 12}, 8, 2, rng);
    const Vector u = random_sparse_vector(12, 2, rng);
    const Vector v = random_sparse_vector(12, 2, rng);
    EXPECT_TRUE(verify_rank_preservation(DenseTensor::from_matrix(u * v.transpose()), e));
    EXPECT_TRUE(verify_rank_preservation(DenseTensor({12, 12}), e));
    for (int trial = 0; trial < 20; ++trial) {
        EXPECT_TRUE(verify_rank_preservation(random_sparse_tensor({12, 12}, 2, rng), e));
    }
}
