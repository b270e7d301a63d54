// SPDX-License-Identifier: MIT
// tensorcs command-line tool.
//
// Exit codes: 0 ok, 2 usage or IO error, 3 contract mismatch (including a
// refused memory budget), 4 numerical failure.

#include "tensorcs/dct.hpp"
#include "tensorcs/decomp.hpp"
#include "tensorcs/error.hpp"
#include "tensorcs/io.hpp"
#include "tensorcs/l1solver.hpp"
#include "tensorcs/parallel.hpp"
#include "tensorcs/pipeline.hpp"
#include "tensorcs/recovery.hpp"
#include "tensorcs/report.hpp"
#include "tensorcs/rng.hpp"
#include "tensorcs/sensing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

namespace tc = tensorcs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;
constexpr int kExitNumerical = 4;

bool use_color() {
    const char* no_color = std::getenv("NO_COLOR");
    return (no_color == nullptr || *no_color == '\0') && isatty(fileno(stdout)) != 0;
}

std::string tag(bool ok) {
    if (!use_color()) return ok ? "PASS" : "FAIL";
    return ok ? "\033[32mPASS\033[0m" : "\033[31mFAIL\033[0m";
}

void print_seed(std::uint64_t seed) {
    std::cout << "seed: " << seed << '\n';
}

std::string dims_text(const tc::Dims& d) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::to_string(d[i]);
    return s;
}

// ---------------------------------------------------------------- sparsify

struct SparsifyArgs {
    std::string in;
    std::string out;
    tc::Dims keep;
    std::uint64_t seed = 0;
};

int run_sparsify(const SparsifyArgs& a) {
    print_seed(a.seed);
    const auto x = tc::io::read_signal(a.in);
    const auto target = tc::dct_sparsify(x, a.keep);
    tc::io::write_dtf(std::filesystem::path(a.out), target);
    const auto k = tc::element_count(a.keep);
    std::cout << "dims: " << dims_text(x.dims()) << '\n' << "k = " << k << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
    tc::Dims dims;
    std::size_t k = 1;
    double c = 1.0;
    std::uint64_t seed = 0;
};

int run_plan(const PlanArgs& a) {
    print_seed(a.seed);
    const auto plan = tc::plan_measurements(a.dims, a.k, a.c);
    std::cout << "mode  N     m_i   clamped\n";
    for (std::size_t i = 0; i < a.dims.size(); ++i) {
        char line[96];
        std::snprintf(line, sizeof line, "%-5zu %-5zu %-5zu %s\n", i + 1, a.dims[i], plan.per_mode_m[i],
                      plan.clamped[i] ? "yes" : "no");
        std::cout << line;
    }
    std::cout << "gtcs total: " << plan.total_m_gtcs << '\n'
              << "kcs total: " << plan.total_m_kcs << '\n'
              << "verdict: "
              << (plan.gtcs_ratio_worse ? "kcs needs fewer measurements than gtcs"
                                        : "gtcs needs no more measurements than kcs")
              << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- sense

struct SenseArgs {
    std::string in;
    std::vector<std::size_t> m;
    double normalized = 0.0;
    std::string distribution = "gaussian";
    double noise_std = 0.0;
    std::string out_obs;
    std::string out_ensemble;
    std::uint64_t seed = 0;
};

int run_sense(const SenseArgs& a) {
    print_seed(a.seed);
    const auto x = tc::io::read_signal(a.in);
    std::vector<std::size_t> m = a.m;
    if (m.empty()) {
        if (a.normalized <= 0.0) throw tc::InvalidArgument("sense: give --m or --normalized");
        m = tc::per_mode_measurements(x.dims(), a.normalized);
    }
    if (m.size() == 1 && x.order() > 1) m.assign(x.order(), m[0]);
    const auto ens = tc::generate_ensemble(x.dims(), m, tc::distribution_from_string(a.distribution), a.seed);
    const auto noisy = tc::add_noise(tc::sample(x, ens), a.noise_std, tc::derive_seed(a.seed, 1));
    tc::io::write_dtf(std::filesystem::path(a.out_obs), noisy.observation);
    tc::save_ensemble(a.out_ensemble, ens);
    std::cout << "measurement dims: " << dims_text(noisy.observation.dims()) << '\n'
              << "epsilon: " << tc::io::format_double(noisy.epsilon) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
    std::string obs;
    std::string ensemble;
    std::string method = "gtcs_s";
    std::size_t k = 1;
    double epsilon = 0.0;
    std::optional<double> delta;
    std::string out;
    std::string report;
    std::string basis = "identity";
    bool relax = false;
    std::size_t max_iter = tc::SolverOptions{}.max_iter;
    double tol = tc::SolverOptions{}.tol_primal;
    std::size_t threads = 0;
    std::size_t memory_budget = tc::kDefaultMemoryBudget;
    bool no_timings = false;
    std::uint64_t seed = 0;
};

int run_recover(const RecoverArgs& a) {
    print_seed(a.seed);
    tc::RecoveryProblem p;
    p.observation = tc::io::read_dtf(std::filesystem::path(a.obs));
    p.ensemble = tc::load_ensemble(a.ensemble);
    if (a.basis == "dct") {
        for (auto& u : p.ensemble.matrices) u = u * tc::dct_matrix(static_cast<std::size_t>(u.cols())).transpose();
    } else if (a.basis != "identity") {
        throw tc::InvalidArgument("recover: --basis must be identity or dct");
    }
    p.k = a.k;
    p.epsilon = a.epsilon;
    p.delta_2k = a.delta;
    p.relax_stages = a.relax;
    p.solver = tc::SolverOptions{a.tol, a.tol, a.max_iter};
    p.threads = a.threads;
    p.memory_budget_bytes = a.memory_budget;
    auto report = tc::recover(tc::method_from_string(a.method), p);
    if (a.basis == "dct") report.estimate = tc::dct_inverse(report.estimate);
    tc::io::write_dtf(std::filesystem::path(a.out), report.estimate);
    if (!a.report.empty()) tc::write_report(a.report, report, !a.no_timings);
    std::cout << "method: " << report.method << '\n' << "dims: " << dims_text(report.estimate.dims()) << '\n';
    if (report.error_bound) std::cout << "error bound: " << tc::io::format_double(*report.error_bound) << '\n';
    for (const auto& n : report.notes) std::cout << "note: " << n << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string config;
    std::string out_csv;
    std::string summary_csv;
    bool no_timings = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

int run_sweep_cmd(const SweepArgs& a) {
    auto cfg = tc::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (a.threads) cfg.threads = *a.threads;
    print_seed(cfg.seed);
    const auto rows = tc::run_sweep(cfg);
    {
        std::ofstream out(a.out_csv, std::ios::binary);
        if (!out) throw tc::IoError("cannot write " + a.out_csv);
        tc::write_metrics_csv(out, rows, !a.no_timings);
    }
    const auto summary = tc::summarize(rows);
    if (!a.summary_csv.empty()) {
        std::ofstream out(a.summary_csv, std::ios::binary);
        if (!out) throw tc::IoError("cannot write " + a.summary_csv);
        tc::write_summary_csv(out, summary, !a.no_timings);
    }
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.status == "ok") continue;
        ++failed;
        std::cerr << r.method << " nm=" << tc::io::format_double(r.normalized_m)
                  << " noise=" << tc::io::format_double(r.noise_std) << " trial=" << r.trial << ": " << r.status
                  << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
    }
    tc::write_summary_csv(std::cout, summary, !a.no_timings);
    std::cout << rows.size() << " rows, " << failed << " not ok\n";
    return kExitOk;
}

// ---------------------------------------------------------------- verify

struct SuiteResult {
    bool pass = true;
    std::string summary;
    std::vector<std::string> failures;
};

tc::Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, tc::Rng& rng) {
    tc::Matrix a(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = rng.gaussian() / std::sqrt(static_cast<double>(rows));
    }
    return a;
}

tc::Matrix nsp_verified(Eigen::Index rows, Eigen::Index cols, std::size_t k, tc::Rng& rng) {
    for (int draw = 0; draw < 10000; ++draw) {
        tc::Matrix a = gaussian_matrix(rows, cols, rng);
        if (tc::check_nsp_exhaustive(a, k)) return a;
    }
    throw tc::NumericalFailure("no NSP matrix found in 10000 draws");
}

tc::DenseTensor sparse_tensor(const tc::Dims& dims, std::size_t k, tc::Rng& rng) {
    tc::DenseTensor x(dims);
    auto data = x.data();
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
        data[idx[i]] = (rng.coin() ? 1.0 : -1.0) * (1.0 + std::abs(rng.gaussian()));
    }
    return x;
}

// Largest ||w_S||_1 / ||w||_1 over |S| = 1 for w sampled densely from a
// two-dimensional null space.
double sampled_nsp_ratio(const tc::Matrix& a) {
    Eigen::JacobiSVD<tc::Matrix> s(a, Eigen::ComputeFullV);
    const tc::Matrix basis = s.matrixV().rightCols(2);
    double worst = 0.0;
    constexpr int kSamples = 100000;
    for (int i = 0; i < kSamples; ++i) {
        const double th = M_PI * i / kSamples;
        const tc::Vector w = basis.col(0) * std::cos(th) + basis.col(1) * std::sin(th);
        worst = std::max(worst, w.cwiseAbs().maxCoeff() / w.lpNorm<1>());
    }
    return worst;
}

SuiteResult suite_nsp(std::uint64_t seed) {
    SuiteResult r;
    tc::Rng rng(seed, 0x500);
    tc::Matrix zero_col = gaussian_matrix(6, 8, rng);
    zero_col.col(3).setZero();
    if (tc::check_nsp_exhaustive(zero_col, 1)) r.failures.push_back("nsp: zero column accepted");
    if (!tc::check_nsp_exhaustive(gaussian_matrix(8, 8, rng), 1)) {
        r.failures.push_back("nsp: invertible matrix rejected");
    }
    std::size_t holds = 0;
    constexpr int kFixtures = 20;
    for (int f = 0; f < kFixtures; ++f) {
        const tc::Matrix a = gaussian_matrix(6, 8, rng);
        const bool exhaustive = tc::check_nsp_exhaustive(a, 1);
        const double ratio = sampled_nsp_ratio(a);
        holds += exhaustive;
        const bool consistent = exhaustive ? ratio < 0.5 : ratio >= 0.5 - 1e-3;
        if (!consistent) {
            r.failures.push_back("nsp: fixture " + std::to_string(f) + " exhaustive=" + (exhaustive ? "true" : "false") +
                                 " sampled ratio=" + tc::io::format_double(ratio));
        }
    }
    r.pass = r.failures.empty();
    r.summary = std::to_string(kFixtures) + " random 6x8 fixtures cross-checked (" + std::to_string(holds) +
                " with NSP_1), zero-column and invertible cases";
    return r;
}

SuiteResult suite_agreement(std::uint64_t seed) {
    SuiteResult r;
    tc::Rng rng(seed, 0x501);
    struct Case {
        tc::Dims dims;
        Eigen::Index m;
        std::vector<tc::Method> methods;
    };
    const std::vector<Case> cases{
        {{12, 12}, 8, {tc::Method::csm_s, tc::Method::csm_p, tc::Method::kcs}},
        {{8, 8, 8}, 6, {tc::Method::gtcs_s, tc::Method::gtcs_p, tc::Method::kcs}},
    };
    std::size_t instances = 0;
    for (const auto& cs : cases) {
        for (int t = 0; t < 5; ++t) {
            std::vector<tc::Matrix> us;
            for (auto n : cs.dims) us.push_back(nsp_verified(cs.m, static_cast<Eigen::Index>(n), 2, rng));
            const auto x = sparse_tensor(cs.dims, 2, rng);
            tc::RecoveryProblem p;
            p.ensemble = tc::MeasurementEnsemble::from_matrices(us);
            p.observation = tc::sample(x, p.ensemble);
            p.k = 2;
            std::vector<tc::DenseTensor> est;
            for (auto m : cs.methods) {
                const auto name = std::string(tc::to_string(m));
                try {
                    est.push_back(tc::recover(m, p).estimate);
                    const double err = tc::relative_error(est.back(), x);
                    if (err > 1e-6) {
                        r.failures.push_back("agreement: " + name + " on " + dims_text(cs.dims) + " instance " +
                                             std::to_string(t) + " error " + tc::io::format_double(err));
                    }
                } catch (const std::exception& e) {
                    r.failures.push_back("agreement: " + name + " failed: " + e.what());
                }
            }
            for (std::size_t i = 0; i < est.size(); ++i) {
                for (std::size_t j = i + 1; j < est.size(); ++j) {
                    if (tc::relative_error(est[i], est[j]) > 1e-5) {
                        r.failures.push_back("agreement: methods disagree on " + dims_text(cs.dims) + " instance " +
                                             std::to_string(t));
                    }
                }
            }
            ++instances;
        }
    }
    r.pass = r.failures.empty();
    r.summary = std::to_string(instances) + " NSP-verified instances, csm_s/csm_p/kcs and gtcs_s/gtcs_p/kcs";
    return r;
}

SuiteResult suite_rank(std::uint64_t seed) {
    SuiteResult r;
    tc::Rng rng(seed, 0x502);
    std::size_t ok = 0;
    for (int t = 0; t < 100; ++t) {
        const auto u1 = nsp_verified(8, 12, 2, rng);
        const auto u2 = nsp_verified(8, 12, 2, rng);
        const auto x = sparse_tensor({12, 12}, 2, rng);
        if (tc::verify_rank_preservation(x, tc::MeasurementEnsemble::from_matrices({u1, u2}))) {
            ++ok;
        } else {
            r.failures.push_back("rank: instance " + std::to_string(t) + " changed rank");
        }
    }
    r.pass = r.failures.empty();
    r.summary = std::to_string(ok) + "/100 random 12x12 2-sparse instances keep their rank";
    return r;
}

struct VerifyArgs {
    std::string suite = "all";
    std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& a) {
    print_seed(a.seed);
    std::vector<std::pair<std::string, SuiteResult (*)(std::uint64_t)>> suites;
    if (a.suite == "nsp" || a.suite == "all") suites.emplace_back("nsp", suite_nsp);
    if (a.suite == "agreement" || a.suite == "all") suites.emplace_back("agreement", suite_agreement);
    if (a.suite == "rank" || a.suite == "all") suites.emplace_back("rank", suite_rank);
    if (suites.empty()) throw tc::InvalidArgument("verify: unknown suite '" + a.suite + "'");
    bool all = true;
    for (const auto& [name, fn] : suites) {
        const auto res = fn(a.seed);
        all = all && res.pass;
        std::cout << tag(res.pass) << ' ' << name << ": " << res.summary << '\n';
        for (const auto& f : res.failures) std::cerr << f << '\n';
    }
    return all ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor compressed sensing: mode-wise sampling and l1 recovery of sparse tensors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tensorcs 0.1.0");

    SparsifyArgs sp;
    auto* sparsify = app.add_subcommand("sparsify", "Keep a low-frequency DCT box of a signal and write the target");
    sparsify->add_option("--in", sp.in, "PGM image, directory of PGM frames, or DTF1 tensor")->required();
    sparsify->add_option("--keep", sp.keep, "kept coefficients per mode, e.g. 16,16")->required()->delimiter(',');
    sparsify->add_option("--out", sp.out, "output DTF1 file")->required();
    sparsify->add_option("--seed", sp.seed, "seed (printed; sparsify is deterministic)");

    PlanArgs pl;
    auto* plan = app.add_subcommand("plan", "Measurement counts for the mode-wise and Kronecker schemes");
    plan->add_option("--dims", pl.dims, "signal dims, e.g. 16,16")->required()->delimiter(',');
    plan->add_option("--k", pl.k, "sparsity")->required();
    plan->add_option("--c", pl.c, "universal constant")->capture_default_str();
    plan->add_option("--seed", pl.seed, "seed (printed; plan is deterministic)");

    SenseArgs se;
    auto* sense = app.add_subcommand("sense", "Draw an ensemble, sample a signal and optionally add noise");
    sense->add_option("--in", se.in, "signal file")->required();
    auto* m_opt = sense->add_option("--m", se.m, "measurements per mode (one value or one per mode)")->delimiter(',');
    sense->add_option("--normalized", se.normalized, "normalized measurements in (0, 1]")->excludes(m_opt);
    sense->add_option("--distribution", se.distribution, "gaussian or bernoulli")->capture_default_str();
    sense->add_option("--noise-std", se.noise_std, "std of additive gaussian noise")->capture_default_str();
    sense->add_option("--out-obs", se.out_obs, "observation DTF1 file")->required();
    sense->add_option("--out-ensemble", se.out_ensemble, "ensemble JSON file (matrices written beside it)")->required();
    sense->add_option("--seed", se.seed, "seed for the ensemble and the noise")->capture_default_str();

    RecoverArgs rc;
    auto* recover = app.add_subcommand("recover", "Recover a sparse signal from an observation");
    recover->add_option("--obs", rc.obs, "observation DTF1 file")->required();
    recover->add_option("--ensemble", rc.ensemble, "ensemble JSON file")->required();
    recover->add_option("--method", rc.method, "csm_s, csm_p, gtcs_s, gtcs_p or kcs")->capture_default_str();
    recover->add_option("--k", rc.k, "sparsity budget")->capture_default_str();
    recover->add_option("--epsilon", rc.epsilon, "noise bound; > 0 selects the noisy variant")->capture_default_str();
    recover->add_option("--delta", rc.delta, "RIP constant delta_2k for the reported error bound");
    recover->add_option("--out", rc.out, "estimate DTF1 file")->required();
    recover->add_option("--report", rc.report, "report JSON file");
    recover->add_option("--basis", rc.basis, "identity, or dct to recover DCT coefficients")->capture_default_str();
    recover->add_flag("--relax", rc.relax, "serial methods: relax stages after the first to BPDN");
    recover->add_option("--max-iter", rc.max_iter, "solver iteration limit")->capture_default_str();
    recover->add_option("--tol", rc.tol, "solver relative tolerance")->capture_default_str();
    recover->add_option("--threads", rc.threads, "worker threads (0 = all)")->capture_default_str();
    recover->add_option("--memory-budget", rc.memory_budget, "kcs memory budget in bytes")->capture_default_str();
    recover->add_flag("--no-timings", rc.no_timings, "write 0 for every timing in the report");
    recover->add_option("--seed", rc.seed, "seed (printed; recovery is deterministic)");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run a measurement/noise sweep from a JSON config");
    sweep->add_option("--config", sw.config, "experiment config JSON")->required();
    sweep->add_option("--out-csv", sw.out_csv, "per-run metrics CSV")->required();
    sweep->add_option("--summary-csv", sw.summary_csv, "per grid point summary CSV");
    sweep->add_flag("--no-timings", sw.no_timings, "write 0 for recovery_seconds");
    sweep->add_option("--seed", sw.seed, "override the config seed");
    sweep->add_option("--threads", sw.threads, "override the config job parallelism");

    VerifyArgs vf;
    auto* verify = app.add_subcommand("verify", "Run invariant suites; exit 0 iff all pass");
    verify->add_option("--suite", vf.suite, "nsp, agreement, rank or all")
        ->check(CLI::IsMember({"nsp", "agreement", "rank", "all"}))
        ->capture_default_str();
    verify->add_option("--seed", vf.seed, "seed for the random fixtures")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sparsify->parsed()) return run_sparsify(sp);
        if (plan->parsed()) return run_plan(pl);
        if (sense->parsed()) return run_sense(se);
        if (recover->parsed()) return run_recover(rc);
        if (sweep->parsed()) return run_sweep_cmd(sw);
        if (verify->parsed()) return run_verify(vf);
    } catch (const tc::StageFailure& e) {
        std::cerr << "error: numerical failure in mode " << e.mode();
        if (e.term()) std::cerr << ", term " << *e.term();
        std::cerr << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const tc::NumericalFailure& e) {
        std::cerr << "error: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const tc::ContractMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitContract;
    } catch (const tc::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << " (required " << e.required_bytes() << " bytes)\n";
        return kExitContract;
    } catch (const tc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tc::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}
