// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tensorcs {

enum class Distribution { gaussian, bernoulli };

[[nodiscard]] std::string_view to_string(Distribution d);
[[nodiscard]] Distribution distribution_from_string(std::string_view s);

/// Per-mode measurement matrices U_i (m_i x N_i) and how they were made.
struct MeasurementEnsemble {
    std::vector<Matrix> matrices;
    Distribution distribution = Distribution::gaussian;
    std::uint64_t seed = 0;
    std::vector<double> scale;  ///< entry standard deviation per matrix, 1/sqrt(m_i)

    /// Wraps explicit matrices (identity, fixtures, loaded files).
    static MeasurementEnsemble from_matrices(std::vector<Matrix> matrices);

    [[nodiscard]] std::size_t order() const noexcept { return matrices.size(); }
    [[nodiscard]] Dims signal_dims() const;
    [[nodiscard]] Dims measurement_dims() const;
};

/// Matrix i is drawn from Rng(seed, kEnsembleStreamBase + i), entries filled
/// row by row. Gaussian entries are N(0, 1/m_i); Bernoulli entries are
/// +-1/sqrt(m_i) with equal probability. Requires 1 <= m_i <= N_i.
///
/// Because of the row-wise fill, the ensembles for m and m' > m under one seed
/// are nested up to scale: the first m rows of U_i(m') are
/// sqrt(m / m') U_i(m).
[[nodiscard]] MeasurementEnsemble generate_ensemble(const Dims& dims, const std::vector<std::size_t>& per_mode_m,
                                                    Distribution distribution, std::uint64_t seed);

/// Y = X x_1 U_1 x_2 ... x_d U_d.
[[nodiscard]] DenseTensor sample(const DenseTensor& x, const MeasurementEnsemble& ensemble);

struct NoisyObservation {
    DenseTensor observation;
    double epsilon = 0.0;  ///< Frobenius norm of the injected noise
};

/// Adds i.i.d. N(0, std^2) noise drawn from Rng(seed, kNoiseStream).
[[nodiscard]] NoisyObservation add_noise(const DenseTensor& y, double stddev, std::uint64_t seed);

struct MeasurementPlan {
    std::size_t k = 0;
    double c = 1.0;
    std::vector<std::size_t> per_mode_m;  ///< ceil(2 c k ln(N_i / k)), clamped to N_i
    std::vector<bool> clamped;            ///< true where the clamp to N_i was applied
    std::size_t total_m_gtcs = 0;         ///< product of per_mode_m
    std::size_t total_m_kcs = 0;          ///< ceil(2 c k (-ln k + sum ln N_i))
    bool gtcs_ratio_worse = false;        ///< total_m_gtcs > total_m_kcs
};

/// Throws InvalidArgument when k < 1, c <= 0 or some N_i <= k.
[[nodiscard]] MeasurementPlan plan_measurements(const Dims& dims, std::size_t k, double c = 1.0);

/// Exhaustive null space property test of order k for N <= 14 columns.
///
/// On each sign orthant, the worst ratio ||w_S||_1 / ||w||_1 over the null
/// space is a convex function maximised at a vertex of
/// {w : A w = 0, ||w||_1 = 1}; those vertices are exactly the null-space
/// vectors vanishing on (nullity - 1) coordinates, so every such set of
/// coordinates is enumerated and the resulting vector tested.
[[nodiscard]] bool check_nsp_exhaustive(const Matrix& a, std::size_t k);

inline constexpr std::size_t kNspMaxColumns = 14;

/// Ensemble on disk: `<stem>.json` metadata plus one DTF1 file per matrix,
/// named `<stem>.U<i>.dtf` (i 1-based) and listed in the JSON.
void save_ensemble(const std::filesystem::path& json_path, const MeasurementEnsemble& ensemble);
[[nodiscard]] MeasurementEnsemble load_ensemble(const std::filesystem::path& json_path);

}  // namespace tensorcs
