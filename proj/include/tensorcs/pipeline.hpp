// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/recovery.hpp"
#include "tensorcs/sensing.hpp"
#include "tensorcs/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tensorcs {

inline constexpr double kPsnrCap = 300.0;

/// 10 log10(peak^2 / MSE), or kPsnrCap when the tensors are identical.
[[nodiscard]] double psnr(const DenseTensor& reference, const DenseTensor& candidate, double peak);

enum class SignalSource { synthetic, file };

/// Sweep description; the JSON keys are the field names.
struct ExperimentConfig {
    SignalSource signal_source = SignalSource::synthetic;
    std::string signal_path;  ///< PGM image, directory of PGM frames, or DTF1 tensor
    Dims dims;                ///< required for synthetic signals; checked against file signals
    Dims dct_keep;
    std::vector<double> normalized_measurement_grid;
    std::vector<double> noise_std_grid{0.0};
    std::vector<Method> methods;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    double c = 1.0;  ///< planner constant, reported alongside the sweep
    std::size_t memory_budget_bytes = kDefaultMemoryBudget;
    Distribution distribution = Distribution::gaussian;
    std::optional<double> peak;  ///< default: 255 for file signals, max |target| otherwise
    std::size_t max_iter = SolverOptions{}.max_iter;
    double tol = SolverOptions{}.tol_primal;
    std::size_t threads = 1;  ///< concurrent jobs; 1 keeps recovery timings comparable
};

/// Parses and validates a config. Throws InvalidArgument on unknown keys,
/// empty grids, normalized measurements outside (0, 1], empty method list or
/// a keep box that does not fit the dims.
[[nodiscard]] ExperimentConfig config_from_json(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string config_to_json(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

struct MetricRow {
    std::string method;
    double normalized_m = 0.0;
    double noise_std = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double psnr_db = 0.0;
    double rel_fro_error = 0.0;
    double recovery_seconds = 0.0;
    std::string status;  ///< ok, not_converged, refused_memory, infeasible, error
    std::string detail;  ///< failure message, not written to CSV
};

/// Equal per-mode measurement counts m = round((nm * prod N)^(1/d)), clamped to [1, N_i].
[[nodiscard]] std::vector<std::size_t> per_mode_measurements(const Dims& dims, double normalized_m);

/// The sparse target signal of a config: a file signal passed through
/// dct_sparsify, or a synthetic signal built from seeded random DCT
/// coefficients inside the keep box and mapped affinely onto [0, 255].
[[nodiscard]] DenseTensor make_target(const ExperimentConfig& cfg);

/// Seed of the measurement ensemble of one trial. It does not depend on the
/// grid point, so ensembles at different normalized_m are nested.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// One row per (method, normalized_m, noise_std, trial), sorted by method
/// name, then normalized_m, noise_std and trial. Recovery runs in the DCT
/// domain with Phi_i = U_i D_i^T; PSNR is measured on the spatial signal.
/// Failed grid points are recorded in `status`, never thrown.
[[nodiscard]] std::vector<MetricRow> run_sweep(const ExperimentConfig& cfg);

inline constexpr const char* kMetricCsvHeader =
    "method,normalized_m,noise_std,trial,seed,psnr_db,rel_fro_error,recovery_seconds,status";

/// Non-finite values are written as "nan". With include_timings = false the
/// recovery_seconds column is written as 0.
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows, bool include_timings = true);

struct SummaryRow {
    std::string method;
    double normalized_m = 0.0;
    double noise_std = 0.0;
    std::size_t runs = 0;
    std::size_t ok = 0;
    double mean_psnr_db = 0.0;  ///< over ok rows; nan when none
    double min_psnr_db = 0.0;
    double max_psnr_db = 0.0;
    double mean_seconds = 0.0;
};

/// Groups by (method, normalized_m, noise_std). Throws InvalidArgument on empty input.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows);

inline constexpr const char* kSummaryCsvHeader =
    "method,normalized_m,noise_std,runs,ok,mean_psnr_db,min_psnr_db,max_psnr_db,mean_seconds";

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, bool include_timings = true);

}  // namespace tensorcs
