// SPDX-License-Identifier: MIT
#include "tensorcs/sensing.hpp"

#include "tensorcs/error.hpp"
#include "tensorcs/io.hpp"
#include "tensorcs/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>

namespace tensorcs {

std::string_view to_string(Distribution d) {
    switch (d) {
        case Distribution::gaussian: return "gaussian";
        case Distribution::bernoulli: return "bernoulli";
    }
    return "gaussian";
}

Distribution distribution_from_string(std::string_view s) {
    if (s == "gaussian") return Distribution::gaussian;
    if (s == "bernoulli") return Distribution::bernoulli;
    throw InvalidArgument("unknown distribution '" + std::string(s) + "'");
}

MeasurementEnsemble MeasurementEnsemble::from_matrices(std::vector<Matrix> matrices) {
    if (matrices.empty()) throw InvalidArgument("ensemble needs at least one matrix");
    MeasurementEnsemble e;
    for (const auto& u : matrices) {
        if (u.rows() == 0 || u.cols() == 0) throw InvalidArgument("ensemble matrices must be nonempty");
        e.scale.push_back(1.0 / std::sqrt(static_cast<double>(u.rows())));
    }
    e.matrices = std::move(matrices);
    return e;
}

Dims MeasurementEnsemble::signal_dims() const {
    Dims d;
    for (const auto& u : matrices) d.push_back(static_cast<std::size_t>(u.cols()));
    return d;
}

Dims MeasurementEnsemble::measurement_dims() const {
    Dims d;
    for (const auto& u : matrices) d.push_back(static_cast<std::size_t>(u.rows()));
    return d;
}

MeasurementEnsemble generate_ensemble(const Dims& dims, const std::vector<std::size_t>& per_mode_m,
                                      Distribution distribution, std::uint64_t seed) {
    validate_dims(dims);
    if (per_mode_m.size() != dims.size()) throw InvalidArgument("generate_ensemble: need one m per mode");
    MeasurementEnsemble e;
    e.distribution = distribution;
    e.seed = seed;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const auto m = per_mode_m[i];
        if (m < 1 || m > dims[i]) {
            throw InvalidArgument("generate_ensemble: m_" + std::to_string(i) + " = " + std::to_string(m) +
                                  " outside [1, " + std::to_string(dims[i]) + "]");
        }
        Rng rng(seed, kEnsembleStreamBase + i);
        const double sd = 1.0 / std::sqrt(static_cast<double>(m));
        Matrix u(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dims[i]));
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            for (Eigen::Index c = 0; c < u.cols(); ++c) {
                u(r, c) = distribution == Distribution::gaussian ? sd * rng.gaussian() : (rng.coin() ? sd : -sd);
            }
        }
        e.matrices.push_back(std::move(u));
        e.scale.push_back(sd);
    }
    return e;
}

DenseTensor sample(const DenseTensor& x, const MeasurementEnsemble& ensemble) {
    if (ensemble.order() != x.order()) {
        throw InvalidArgument("sample: ensemble has " + std::to_string(ensemble.order()) +
                              " matrices for a tensor of order " + std::to_string(x.order()));
    }
    if (ensemble.signal_dims() != x.dims()) throw InvalidArgument("sample: ensemble does not conform to signal dims");
    return multi_mode_product(x, ensemble.matrices);
}

NoisyObservation add_noise(const DenseTensor& y, double stddev, std::uint64_t seed) {
    if (!(stddev >= 0.0)) throw InvalidArgument("add_noise: std must be nonnegative");
    NoisyObservation out{y, 0.0};
    if (stddev == 0.0) return out;
    Rng rng(seed, kNoiseStream);
    double sq = 0.0;
    for (auto& v : out.observation.data()) {
        const double e = stddev * rng.gaussian();
        v += e;
        sq += e * e;
    }
    out.epsilon = std::sqrt(sq);
    return out;
}

MeasurementPlan plan_measurements(const Dims& dims, std::size_t k, double c) {
    validate_dims(dims);
    if (k < 1) throw InvalidArgument("plan_measurements: k must be >= 1");
    if (!(c > 0.0)) throw InvalidArgument("plan_measurements: c must be positive");
    MeasurementPlan plan;
    plan.k = k;
    plan.c = c;
    const double kd = static_cast<double>(k);
    double log_sum = -std::log(kd);
    plan.total_m_gtcs = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] <= k) {
            throw InvalidArgument("plan_measurements: N_" + std::to_string(i) + " = " + std::to_string(dims[i]) +
                                  " must exceed k = " + std::to_string(k));
        }
        const double n = static_cast<double>(dims[i]);
        const auto raw = static_cast<std::size_t>(std::ceil(2.0 * c * kd * std::log(n / kd)));
        const bool clamp = raw > dims[i];
        plan.per_mode_m.push_back(clamp ? dims[i] : std::max<std::size_t>(raw, 1));
        plan.clamped.push_back(clamp);
        plan.total_m_gtcs *= plan.per_mode_m.back();
        log_sum += std::log(n);
    }
    plan.total_m_kcs = static_cast<std::size_t>(std::ceil(2.0 * c * kd * log_sum));
    plan.gtcs_ratio_worse = plan.total_m_gtcs > plan.total_m_kcs;
    return plan;
}

bool check_nsp_exhaustive(const Matrix& a, std::size_t k) {
    const auto n = static_cast<std::size_t>(a.cols());
    if (n == 0) throw InvalidArgument("check_nsp_exhaustive: matrix has no columns");
    if (n > kNspMaxColumns) {
        throw InvalidArgument("check_nsp_exhaustive: refusing N = " + std::to_string(n) + " > " +
                              std::to_string(kNspMaxColumns) + " columns");
    }
    if (k == 0) return true;

    // Null-space basis from a full SVD.
    Eigen::JacobiSVD<Matrix> full(a, Eigen::ComputeFullV);
    const auto& sv = full.singularValues();
    const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon() *
                       (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > tol) ++rank;
    const auto nullity = static_cast<Eigen::Index>(n) - rank;
    if (nullity == 0) return true;
    const Matrix basis = full.matrixV().rightCols(nullity);

    const auto violates = [k](Vector w) {
        const double total = w.lpNorm<1>();
        if (total == 0.0) return false;
        w = w.cwiseAbs() / total;
        std::sort(w.data(), w.data() + w.size(), std::greater<>());
        const double head = w.head(static_cast<Eigen::Index>(std::min<std::size_t>(k, static_cast<std::size_t>(w.size())))).sum();
        return head >= 0.5 - 1e-10;
    };

    const auto zeros = static_cast<std::size_t>(nullity - 1);
    if (zeros == 0) return !violates(basis.col(0));

    std::vector<Eigen::Index> idx(zeros);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    while (true) {
        Matrix rows(static_cast<Eigen::Index>(zeros), nullity);
        for (std::size_t r = 0; r < zeros; ++r) rows.row(static_cast<Eigen::Index>(r)) = basis.row(idx[r]);
        Eigen::JacobiSVD<Matrix> sub(rows, Eigen::ComputeFullV);
        const auto& s = sub.singularValues();
        const double sub_tol = 1e-10 * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
        // Vertex only when the zero pattern pins a single direction.
        if (s.size() == static_cast<Eigen::Index>(zeros) && s(s.size() - 1) > sub_tol) {
            const Vector t = sub.matrixV().col(nullity - 1);
            if (violates(basis * t)) return false;
        }
        std::size_t pos = zeros;
        while (pos > 0 && static_cast<std::size_t>(idx[pos - 1]) == n - zeros + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < zeros; ++j) idx[j] = idx[j - 1] + 1;
    }
    return true;
}

void save_ensemble(const std::filesystem::path& json_path, const MeasurementEnsemble& ensemble) {
    nlohmann::json meta;
    meta["format"] = "tensorcs-ensemble-1";
    meta["distribution"] = to_string(ensemble.distribution);
    meta["seed"] = ensemble.seed;
    meta["dims"] = ensemble.signal_dims();
    meta["m"] = ensemble.measurement_dims();
    meta["scale"] = ensemble.scale;
    auto files = nlohmann::json::array();
    const auto stem = json_path.stem().string();
    for (std::size_t i = 0; i < ensemble.order(); ++i) {
        const auto name = stem + ".U" + std::to_string(i + 1) + ".dtf";
        io::write_dtf(json_path.parent_path() / name, DenseTensor::from_matrix(ensemble.matrices[i]));
        files.push_back(name);
    }
    meta["matrices"] = files;
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write " + json_path.string());
    out << meta.dump(2) << '\n';
}

MeasurementEnsemble load_ensemble(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw IoError("cannot open " + json_path.string());
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("ensemble metadata: " + std::string(e.what()));
    }
    try {
        std::vector<Matrix> mats;
        for (const auto& name : meta.at("matrices")) {
            const auto t = io::read_dtf(json_path.parent_path() / name.get<std::string>());
            if (t.order() != 2) throw ContractMismatch("ensemble matrix file is not 2-mode");
            mats.push_back(t.to_matrix());
        }
        auto e = MeasurementEnsemble::from_matrices(std::move(mats));
        e.distribution = distribution_from_string(meta.at("distribution").get<std::string>());
        e.seed = meta.at("seed").get<std::uint64_t>();
        if (meta.contains("dims") && meta["dims"].get<Dims>() != e.signal_dims()) {
            throw ContractMismatch("ensemble metadata dims disagree with matrix files");
        }
        if (meta.contains("m") && meta["m"].get<Dims>() != e.measurement_dims()) {
            throw ContractMismatch("ensemble metadata m disagrees with matrix files");
        }
        if (meta.contains("scale")) e.scale = meta["scale"].get<std::vector<double>>();
        return e;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("ensemble metadata: " + std::string(e.what()));
    }
}

}  // namespace tensorcs
