// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/error.hpp"
#include "tensorcs/l1solver.hpp"
#include "tensorcs/sensing.hpp"
#include "tensorcs/tensor.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tensorcs {

enum class Method { csm_s, csm_p, gtcs_s, gtcs_p, kcs };

[[nodiscard]] std::string_view to_string(Method m);
/// Accepts csm_s, csm_p, gtcs_s, gtcs_p, kcs.
[[nodiscard]] Method method_from_string(std::string_view s);

/// Per-factor BPDN tolerance used by the noisy parallel methods.
enum class FactorTolerance {
    per_theorem,  ///< eps / sqrt(2k) for matrices, eps / (2k) for d >= 3
    matrix_rule,  ///< eps / sqrt(2k) regardless of order
    tensor_rule,  ///< eps / (2k) regardless of order
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{256} << 20;

struct RecoveryProblem {
    DenseTensor observation;
    MeasurementEnsemble ensemble;
    std::size_t k = 1;
    double epsilon = 0.0;  ///< total noise bound ||E||_F; 0 selects the noiseless methods
    std::optional<double> delta_2k;
    /// Optional per-mode sparsity (one entry per mode). When present, the
    /// noisy parallel methods cap the terms kept per decomposition level by
    /// its largest entry instead of k.
    std::vector<std::size_t> per_mode_k;
    SolverOptions solver;
    /// Noiseless serial recovery only: stages after the first solve BPDN with
    /// tolerance 10 * tol_primal * ||stage input||_F instead of exact BP.
    bool relax_stages = false;
    FactorTolerance factor_tolerance = FactorTolerance::per_theorem;
    std::size_t threads = 0;  ///< 0 = all available (still capped by TENSORCS_THREADS)
    std::size_t memory_budget_bytes = kDefaultMemoryBudget;  ///< kcs only
};

struct StageReport {
    std::size_t mode = 0;
    std::size_t subproblem_count = 0;
    double max_residual = 0.0;
    std::size_t max_iterations = 0;
    double tolerance = 0.0;  ///< per-subproblem epsilon (0 = equality)
    bool relaxed = false;
    double seconds = 0.0;
};

struct RecoveryReport {
    DenseTensor estimate;
    std::string method;
    std::vector<StageReport> stages;
    double total_seconds = 0.0;
    double epsilon = 0.0;
    std::optional<double> error_bound;  ///< C_2^d eps when delta_2k was supplied
    std::size_t term_count = 0;         ///< rank-one terms in the decomposition (parallel methods)
    std::size_t kept_terms = 0;         ///< terms actually recovered after truncation
    bool truncated = false;
    std::vector<std::string> notes;
};

/// Raised when a subproblem does not converge or stays infeasible. Carries
/// the mode and, for the parallel methods, the term index.
class StageFailure : public NumericalFailure {
public:
    StageFailure(const std::string& what, std::size_t mode, std::optional<std::size_t> term = std::nullopt)
        : NumericalFailure(what), mode_(mode), term_(term) {}
    [[nodiscard]] std::size_t mode() const noexcept { return mode_; }
    [[nodiscard]] std::optional<std::size_t> term() const noexcept { return term_; }

private:
    std::size_t mode_;
    std::optional<std::size_t> term_;
};

// Noiseless methods (epsilon must be 0).

/// Matrix serial recovery: columns of Y through U_1, then rows of the result through U_2.
[[nodiscard]] RecoveryReport csm_s(const RecoveryProblem& p);
/// Matrix parallel recovery from the SVD rank decomposition of Y.
[[nodiscard]] RecoveryReport csm_p(const RecoveryProblem& p);
/// Serial recovery mode by mode: unfold, solve one problem per column, fold.
[[nodiscard]] RecoveryReport gtcs_s(const RecoveryProblem& p);
/// Parallel recovery of every factor of a weak Tucker decomposition of Y.
[[nodiscard]] RecoveryReport gtcs_p(const RecoveryProblem& p);

// Noisy methods (epsilon must be > 0).

/// Stage s (0-based) solves BPDN per column with tolerance
/// C_2^s eps / sqrt(columns of the stage-s unfolding); C_2 = c2_constant(delta_2k),
/// or 4 without delta_2k. An infeasible stage is retried once with the
/// tolerance scaled by sqrt 2.
[[nodiscard]] RecoveryReport csm_s_noisy(const RecoveryProblem& p);
[[nodiscard]] RecoveryReport gtcs_s_noisy(const RecoveryProblem& p);
/// Truncates the SVD of Y at k' = min(k, #{sigma > eps / sqrt k}), recovers
/// x_i, y_i from sigma_i u_i and sigma_i v_i by BPDN and assembles
/// sum (1 / sigma_i) x_i y_i^T.
[[nodiscard]] RecoveryReport csm_p_noisy(const RecoveryProblem& p);
/// Weak Tucker decomposition truncated at rank_tol = eps / sqrt k and at most
/// k terms per level; every factor recovered by BPDN.
[[nodiscard]] RecoveryReport gtcs_p_noisy(const RecoveryProblem& p);

/// Vectorised baseline with the explicit Kronecker matrix U_d (x) ... (x) U_1.
/// Throws BudgetExceeded when the solver's working set would exceed
/// p.memory_budget_bytes.
[[nodiscard]] RecoveryReport kcs_recover(const RecoveryProblem& p);
/// Working-set bytes kcs_recover needs for the given ensemble shape.
[[nodiscard]] std::size_t kcs_required_bytes(const Dims& signal_dims, const Dims& measurement_dims);

/// Picks the noiseless or noisy variant of `method` from p.epsilon.
[[nodiscard]] RecoveryReport recover(Method method, const RecoveryProblem& p);

/// rank(U_1 X U_2^T) == rank(X) with ranks counted above 1e-8 * sigma_1 of
/// each matrix. X must be a 2-mode tensor.
[[nodiscard]] bool verify_rank_preservation(const DenseTensor& x, const MeasurementEnsemble& ensemble);

}  // namespace tensorcs
