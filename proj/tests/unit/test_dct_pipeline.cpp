// SPDX-License-Identifier: MIT
#include "fixtures.hpp"

#include "tensorcs/dct.hpp"
#include "tensorcs/error.hpp"
#include "tensorcs/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace tensorcs;
using namespace tensorcs::fixtures;

TEST(Dct, MatrixIsOrthonormalDctII) {
    const Matrix d2 = dct_matrix(2);
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(d2(0, 0), h, 1e-15);
    EXPECT_NEAR(d2(1, 0), h, 1e-15);
    EXPECT_NEAR(d2(1, 1), -h, 1e-15);
    for (std::size_t n : {1, 5, 8, 17}) {
        const Matrix d = dct_matrix(n);
        const auto ni = static_cast<Eigen::Index>(n);
        EXPECT_LT((d * d.transpose() - Matrix::Identity(ni, ni)).norm(), 1e-13);
    }
    // entry (k, j) = s_k cos(pi (2j + 1) k / 2n)
    const Matrix d8 = dct_matrix(8);
    EXPECT_NEAR(d8(3, 5), std::sqrt(2.0 / 8.0) * std::cos(M_PI * 11.0 * 3.0 / 16.0), 1e-15);
}

TEST(Dct, ForwardInverseRoundTrip) {
    Rng rng(1);
    const DenseTensor x = random_tensor({4, 6, 3}, rng);
    EXPECT_LT(relative_error(dct_inverse(dct_forward(x)), x), 1e-14);
    EXPECT_NEAR(frobenius_norm(dct_forward(x)), frobenius_norm(x), 1e-12);
}

TEST(DctSparsify, FullBoxIsIdentity) {
    Rng rng(2);
    const DenseTensor x = random_tensor({5, 7}, rng);
    EXPECT_LT((dct_sparsify(x, {5, 7}).vec() - x.vec()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DctSparsify, ConstantSurvivesAnyBoxWithDc) {
    DenseTensor x({6, 6, 4});
    for (auto& v : x.data()) v = 3.5;
    const DenseTensor y = dct_sparsify(x, {1, 2, 1});
    EXPECT_LT((y.vec() - x.vec()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DctSparsify, CoefficientsVanishOutsideBox) {
    Rng rng(3);
    const DenseTensor x = random_tensor({8, 8}, rng);
    const DenseTensor c = dct_forward(dct_sparsify(x, {4, 4}));
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            const double v = std::abs(c.at({i, j}));
            if (i >= 4 || j >= 4) {
                EXPECT_LT(v, 1e-12);
            } else if (v > 1e-12) {
                ++nonzero;
            }
        }
    }
    EXPECT_LE(nonzero, 16u);
}

TEST(DctSparsify, Idempotent) {
    Rng rng(4);
    const DenseTensor x = random_tensor({6, 5, 4}, rng);
    const DenseTensor once = dct_sparsify(x, {3, 2, 2});
    EXPECT_LT((dct_sparsify(once, {3, 2, 2}).vec() - once.vec()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DctSparsify, RejectsBadBox) {
    const DenseTensor x({4, 4});
    EXPECT_THROW((void)dct_sparsify(x, {5, 4}), InvalidArgument);
    EXPECT_THROW((void)dct_sparsify(x, {0, 4}), InvalidArgument);
    EXPECT_THROW((void)dct_sparsify(x, {4}), InvalidArgument);
}

TEST(Psnr, Examples) {
    Rng rng(5);
    const DenseTensor a = random_tensor({4, 4}, rng);
    EXPECT_EQ(psnr(a, a, 1.0), kPsnrCap);

    DenseTensor zero({3, 3});
    DenseTensor full({3, 3});
    for (auto& v : full.data()) v = 255.0;
    EXPECT_NEAR(psnr(zero, full, 255.0), 0.0, 1e-12);

    DenseTensor one = zero;
    for (auto& v : one.data()) v = 1.0;
    DenseTensor two = zero;
    for (auto& v : two.data()) v = std::sqrt(2.0);
    EXPECT_NEAR(psnr(zero, one, 255.0) - psnr(zero, two, 255.0), 10.0 * std::log10(2.0), 1e-12);

    EXPECT_THROW((void)psnr(a, DenseTensor({4, 3}), 1.0), InvalidArgument);
    EXPECT_THROW((void)psnr(a, a, 0.0), InvalidArgument);
}

TEST(PerModeMeasurements, EqualAcrossModes) {
    EXPECT_EQ(per_mode_measurements({32, 32}, 0.25), (std::vector<std::size_t>{16, 16}));
    EXPECT_EQ(per_mode_measurements({24, 24, 24}, 0.125), (std::vector<std::size_t>{12, 12, 12}));
    // clamped to [1, N_i]
    EXPECT_EQ(per_mode_measurements({4, 64}, 1.0), (std::vector<std::size_t>{4, 16}));
    EXPECT_EQ(per_mode_measurements({8, 8}, 1e-6), (std::vector<std::size_t>{1, 1}));
}

TEST(Config, ParsesAndRoundTrips) {
    const std::string text = R"({
        "signal_source": "synthetic", "dims": [8, 8], "dct_keep": [2, 2],
        "normalized_measurement_grid": [0.5, 1.0], "noise_std_grid": [0, 1],
        "methods": ["gtcs_s", "kcs"], "trials": 3, "seed": 11, "c": 1.5,
        "memory_budget_bytes": 1000000
    })";
    const ExperimentConfig cfg = config_from_json(text);
    EXPECT_EQ(cfg.dims, (Dims{8, 8}));
    EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::gtcs_s, Method::kcs}));
    EXPECT_EQ(cfg.trials, 3u);
    EXPECT_EQ(cfg.seed, 11u);
    EXPECT_EQ(cfg.memory_budget_bytes, 1000000u);
    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(Config, RejectsInvalid) {
    const std::string base = R"("dims": [8, 8], "dct_keep": [2, 2], "normalized_measurement_grid": [0.5])";
    EXPECT_THROW((void)config_from_json("{" + base + R"(, "methods": []})"), InvalidArgument);
    EXPECT_THROW((void)config_from_json("{" + base + R"(, "methods": ["omp"]})"), InvalidArgument);
    EXPECT_THROW((void)config_from_json("{" + base + R"(, "methods": ["kcs"], "bogus": 1})"), InvalidArgument);
    EXPECT_THROW((void)config_from_json(R"({"dims": [8, 8], "dct_keep": [2, 2], "normalized_measurement_grid": [1.5], "methods": ["kcs"]})"),
                 InvalidArgument);
    EXPECT_THROW((void)config_from_json(R"({"dims": [8, 8], "dct_keep": [9, 2], "normalized_measurement_grid": [0.5], "methods": ["kcs"]})"),
                 InvalidArgument);
    EXPECT_THROW((void)config_from_json("not json"), InvalidArgument);
}

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.dims = {6, 6};
    cfg.dct_keep = {2, 2};
    cfg.normalized_measurement_grid = {1.0};
    cfg.methods = {Method::gtcs_s};
    cfg.trials = 1;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST(Sweep, SinglePointGivesOneExactRow) {
    const auto rows = run_sweep(tiny_config());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].method, "gtcs_s");
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[0].seed, trial_seed(3, 0));
    EXPECT_GE(rows[0].psnr_db, 200.0);
}

TEST(Sweep, RowsSortedAndDeterministic) {
    ExperimentConfig cfg = tiny_config();
    cfg.dims = {8, 8};
    cfg.normalized_measurement_grid = {0.75, 0.5};
    cfg.noise_std_grid = {0.0, 0.5};
    cfg.methods = {Method::kcs, Method::gtcs_p};
    cfg.trials = 2;
    const auto a = run_sweep(cfg);
    ASSERT_EQ(a.size(), 16u);
    EXPECT_EQ(a.front().method, "gtcs_p");
    EXPECT_EQ(a.front().normalized_m, 0.5);
    std::ostringstream sa;
    write_metrics_csv(sa, a, false);
    cfg.threads = 3;
    std::ostringstream sb;
    write_metrics_csv(sb, run_sweep(cfg), false);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), kMetricCsvHeader);
}

TEST(Sweep, KcsRefusedOverBudget) {
    ExperimentConfig cfg = tiny_config();
    cfg.methods = {Method::kcs};
    cfg.memory_budget_bytes = 1000;
    const auto rows = run_sweep(cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].status, "refused_memory");
    EXPECT_TRUE(std::isnan(rows[0].psnr_db));
}

TEST(Sweep, TargetIsSparseInDct) {
    ExperimentConfig cfg = tiny_config();
    cfg.dims = {10, 10, 4};
    cfg.dct_keep = {3, 2, 2};
    const DenseTensor t = make_target(cfg);
    EXPECT_EQ(t.dims(), cfg.dims);
    EXPECT_LE(count_nonzeros(dct_forward(t), 1e-9), 12u);
    EXPECT_EQ(make_target(cfg), t);
}

namespace {

MetricRow row(const std::string& method, double nm, double psnr_db, double seconds, const std::string& status = "ok") {
    MetricRow r;
    r.method = method;
    r.normalized_m = nm;
    r.psnr_db = psnr_db;
    r.recovery_seconds = seconds;
    r.status = status;
    return r;
}

}  // namespace

TEST(Summarize, Examples) {
    const auto one = summarize({row("kcs", 0.5, 42.0, 1.0)});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].mean_psnr_db, 42.0);
    EXPECT_EQ(one[0].min_psnr_db, 42.0);
    EXPECT_EQ(one[0].max_psnr_db, 42.0);
    EXPECT_EQ(one[0].mean_seconds, 1.0);

    const auto same = summarize({row("kcs", 0.5, 30.0, 1.0), row("kcs", 0.5, 30.0, 3.0)});
    EXPECT_EQ(same[0].mean_psnr_db, 30.0);
    EXPECT_EQ(same[0].mean_seconds, 2.0);

    const auto mixed = summarize({row("gtcs_p", 0.1, 40.0, 1.0), row("gtcs_p", 0.1, 60.0, 1.0),
                                  row("gtcs_p", 0.1, 0.0, 0.0, "not_converged"), row("kcs", 0.1, 10.0, 1.0)});
    ASSERT_EQ(mixed.size(), 2u);
    EXPECT_EQ(mixed[0].method, "gtcs_p");
    EXPECT_EQ(mixed[0].runs, 3u);
    EXPECT_EQ(mixed[0].ok, 2u);
    EXPECT_EQ(mixed[0].mean_psnr_db, 50.0);

    EXPECT_THROW((void)summarize({}), InvalidArgument);
}

TEST(Summarize, CsvHeader) {
    std::ostringstream out;
    write_summary_csv(out, summarize({row("kcs", 0.5, 42.0, 1.0)}), false);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kSummaryCsvHeader);
}
