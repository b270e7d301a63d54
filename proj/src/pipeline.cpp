// SPDX-License-Identifier: MIT
#include "tensorcs/pipeline.hpp"

#include "tensorcs/dct.hpp"
#include "tensorcs/error.hpp"
#include "tensorcs/io.hpp"
#include "tensorcs/parallel.hpp"
#include "tensorcs/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace tensorcs {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    return std::isfinite(v) ? io::format_double(v) : std::string("nan");
}

std::string_view to_string(SignalSource s) {
    return s == SignalSource::file ? "file" : "synthetic";
}

DenseTensor synthetic_target(const Dims& dims, const Dims& keep, std::uint64_t seed) {
    DenseTensor coeffs(dims);
    Rng rng(seed, kSignalStream);
    std::vector<std::size_t> idx(dims.size(), 0);
    auto data = coeffs.data();
    for (std::size_t lin = 0; lin < data.size(); ++lin) {
        bool inside = true;
        double freq = 0.0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            inside = inside && idx[i] < keep[i];
            freq += static_cast<double>(idx[i]);
        }
        if (inside) data[lin] = rng.gaussian() / (1.0 + freq);
        for (std::size_t i = 0; i < dims.size() && ++idx[i] == dims[i]; ++i) idx[i] = 0;
    }
    DenseTensor x = dct_inverse(coeffs);
    const auto [lo, hi] = std::ranges::minmax(x.data());
    for (auto& v : x.data()) v = hi > lo ? 255.0 * (v - lo) / (hi - lo) : 127.5;
    return x;
}

std::string classify(const std::exception& e) {
    if (dynamic_cast<const BudgetExceeded*>(&e) != nullptr) return "refused_memory";
    if (dynamic_cast<const NumericalFailure*>(&e) != nullptr) {
        return std::string_view(e.what()).find("infeasible") != std::string_view::npos ? "infeasible"
                                                                                         : "not_converged";
    }
    return "error";
}

}  // namespace

double psnr(const DenseTensor& reference, const DenseTensor& candidate, double peak) {
    if (reference.dims() != candidate.dims()) throw InvalidArgument("psnr: dimension mismatch");
    if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be positive");
    const double mse = (reference.vec() - candidate.vec()).squaredNorm() / static_cast<double>(reference.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.signal_source == SignalSource::file && cfg.signal_path.empty()) {
        throw InvalidArgument("config: file signal needs signal_path");
    }
    if (cfg.signal_source == SignalSource::synthetic) validate_dims(cfg.dims);
    if (!cfg.dims.empty() && cfg.dct_keep.size() != cfg.dims.size()) {
        throw InvalidArgument("config: dct_keep needs one extent per mode");
    }
    for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
        if (cfg.dct_keep[i] < 1 || cfg.dct_keep[i] > cfg.dims[i]) {
            throw InvalidArgument("config: dct_keep[" + std::to_string(i) + "] outside [1, dims]");
        }
    }
    if (cfg.normalized_measurement_grid.empty()) throw InvalidArgument("config: empty normalized_measurement_grid");
    for (double nm : cfg.normalized_measurement_grid) {
        if (!(nm > 0.0 && nm <= 1.0)) throw InvalidArgument("config: normalized measurements must lie in (0, 1]");
    }
    if (cfg.noise_std_grid.empty()) throw InvalidArgument("config: empty noise_std_grid");
    for (double s : cfg.noise_std_grid) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("config: noise std must be finite and >= 0");
    }
    if (cfg.methods.empty()) throw InvalidArgument("config: empty method list");
    if (cfg.trials < 1) throw InvalidArgument("config: trials must be >= 1");
    if (!(cfg.c > 0.0)) throw InvalidArgument("config: c must be positive");
    if (cfg.peak && !(*cfg.peak > 0.0)) throw InvalidArgument("config: peak must be positive");
    if (!(cfg.tol > 0.0)) throw InvalidArgument("config: tol must be positive");
    if (cfg.max_iter < 1) throw InvalidArgument("config: max_iter must be >= 1");
}

ExperimentConfig config_from_json(const std::string& text) {
    static const std::set<std::string> known{
        "signal_source", "signal_path", "dims", "dct_keep", "normalized_measurement_grid", "noise_std_grid",
        "methods", "trials", "seed", "c", "memory_budget_bytes", "distribution", "peak", "max_iter", "tol",
        "threads"};
    ExperimentConfig cfg;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
        for (const auto& [key, _] : j.items()) {
            if (!known.contains(key)) throw InvalidArgument("config: unknown key '" + key + "'");
        }
        if (j.contains("signal_source")) {
            const auto s = j["signal_source"].get<std::string>();
            if (s == "file") {
                cfg.signal_source = SignalSource::file;
            } else if (s == "synthetic") {
                cfg.signal_source = SignalSource::synthetic;
            } else {
                throw InvalidArgument("config: signal_source must be file or synthetic");
            }
        }
        if (j.contains("signal_path")) cfg.signal_path = j["signal_path"].get<std::string>();
        if (j.contains("dims")) cfg.dims = j["dims"].get<Dims>();
        if (j.contains("dct_keep")) cfg.dct_keep = j["dct_keep"].get<Dims>();
        cfg.normalized_measurement_grid = j.at("normalized_measurement_grid").get<std::vector<double>>();
        if (j.contains("noise_std_grid")) cfg.noise_std_grid = j["noise_std_grid"].get<std::vector<double>>();
        for (const auto& m : j.at("methods")) cfg.methods.push_back(method_from_string(m.get<std::string>()));
        if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("c")) cfg.c = j["c"].get<double>();
        if (j.contains("memory_budget_bytes")) cfg.memory_budget_bytes = j["memory_budget_bytes"].get<std::size_t>();
        if (j.contains("distribution")) {
            cfg.distribution = distribution_from_string(j["distribution"].get<std::string>());
        }
        if (j.contains("peak") && !j["peak"].is_null()) cfg.peak = j["peak"].get<double>();
        if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<std::size_t>();
        if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["signal_source"] = to_string(cfg.signal_source);
    if (!cfg.signal_path.empty()) j["signal_path"] = cfg.signal_path;
    j["dims"] = cfg.dims;
    j["dct_keep"] = cfg.dct_keep;
    j["normalized_measurement_grid"] = cfg.normalized_measurement_grid;
    j["noise_std_grid"] = cfg.noise_std_grid;
    auto methods = nlohmann::ordered_json::array();
    for (auto m : cfg.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["c"] = cfg.c;
    j["memory_budget_bytes"] = cfg.memory_budget_bytes;
    j["distribution"] = to_string(cfg.distribution);
    j["peak"] = cfg.peak ? nlohmann::ordered_json(*cfg.peak) : nlohmann::ordered_json();
    j["max_iter"] = cfg.max_iter;
    j["tol"] = cfg.tol;
    j["threads"] = cfg.threads;
    return j.dump(2) + "\n";
}

std::vector<std::size_t> per_mode_measurements(const Dims& dims, double normalized_m) {
    validate_dims(dims);
    if (!(normalized_m > 0.0 && normalized_m <= 1.0)) {
        throw InvalidArgument("normalized measurements must lie in (0, 1]");
    }
    const double total = normalized_m * static_cast<double>(element_count(dims));
    const double per = std::round(std::pow(total, 1.0 / static_cast<double>(dims.size())));
    std::vector<std::size_t> m;
    for (auto n : dims) m.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(per, 1.0)), 1, n));
    return m;
}

DenseTensor make_target(const ExperimentConfig& cfg) {
    if (cfg.signal_source == SignalSource::synthetic) {
        validate_config(cfg);
        return synthetic_target(cfg.dims, cfg.dct_keep, cfg.seed);
    }
    DenseTensor x = io::read_signal(cfg.signal_path);
    if (!cfg.dims.empty() && cfg.dims != x.dims()) {
        throw ContractMismatch("signal dims do not match the config dims");
    }
    return dct_sparsify(x, cfg.dct_keep);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    return derive_seed(seed, trial);
}

std::vector<MetricRow> run_sweep(const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    const DenseTensor target = make_target(cfg);
    if (cfg.dims.empty()) cfg.dims = target.dims();
    validate_config(cfg);

    const Dims& dims = cfg.dims;
    const double peak = cfg.peak ? *cfg.peak
                                 : (cfg.signal_source == SignalSource::file ? 255.0 : target.vec().cwiseAbs().maxCoeff());
    std::vector<Matrix> dct_t;
    for (auto n : dims) dct_t.push_back(dct_matrix(n).transpose());
    const std::size_t k = element_count(cfg.dct_keep);

    struct Job {
        Method method;
        std::size_t grid;
        std::size_t noise;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (auto m : cfg.methods) {
        for (std::size_t g = 0; g < cfg.normalized_measurement_grid.size(); ++g) {
            for (std::size_t s = 0; s < cfg.noise_std_grid.size(); ++s) {
                for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back({m, g, s, t});
            }
        }
    }

    auto rows = parallel_map<MetricRow>(
        jobs.size(),
        [&](std::size_t idx) {
            const Job& job = jobs[idx];
            MetricRow row;
            row.method = std::string(to_string(job.method));
            row.normalized_m = cfg.normalized_measurement_grid[job.grid];
            row.noise_std = cfg.noise_std_grid[job.noise];
            row.trial = job.trial;
            row.seed = trial_seed(cfg.seed, job.trial);
            row.psnr_db = kNan;
            row.rel_fro_error = kNan;
            try {
                const auto m = per_mode_measurements(dims, row.normalized_m);
                const auto ens = generate_ensemble(dims, m, cfg.distribution, row.seed);
                const auto noisy = add_noise(sample(target, ens), row.noise_std, derive_seed(row.seed, 1, job.noise));
                std::vector<Matrix> phi;
                for (std::size_t i = 0; i < dims.size(); ++i) phi.push_back(ens.matrices[i] * dct_t[i]);

                RecoveryProblem p;
                p.observation = noisy.observation;
                p.ensemble = MeasurementEnsemble::from_matrices(std::move(phi));
                p.k = k;
                p.epsilon = noisy.epsilon;
                p.solver = SolverOptions{cfg.tol, cfg.tol, cfg.max_iter};
                p.threads = 1;
                p.memory_budget_bytes = cfg.memory_budget_bytes;
                const auto report = recover(job.method, p);
                const DenseTensor estimate = dct_inverse(report.estimate);
                row.psnr_db = psnr(target, estimate, peak);
                row.rel_fro_error = relative_error(estimate, target);
                row.recovery_seconds = report.total_seconds;
                row.status = "ok";
            } catch (const std::exception& e) {
                row.status = classify(e);
                row.detail = e.what();
            }
            return row;
        },
        cfg.threads);

    std::ranges::sort(rows, [](const MetricRow& a, const MetricRow& b) {
        return std::tie(a.method, a.normalized_m, a.noise_std, a.trial) <
               std::tie(b.method, b.normalized_m, b.noise_std, b.trial);
    });
    return rows;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows, bool include_timings) {
    out << kMetricCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.method << ',' << num(r.normalized_m) << ',' << num(r.noise_std) << ',' << r.trial << ',' << r.seed
            << ',' << num(r.psnr_db) << ',' << num(r.rel_fro_error) << ','
            << num(include_timings ? r.recovery_seconds : 0.0) << ',' << r.status << '\n';
    }
}

std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows) {
    if (rows.empty()) throw InvalidArgument("summarize: no rows");
    using Key = std::tuple<std::string, double, double>;
    std::map<Key, std::vector<const MetricRow*>> groups;
    for (const auto& r : rows) groups[{r.method, r.normalized_m, r.noise_std}].push_back(&r);
    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        std::tie(s.method, s.normalized_m, s.noise_std) = key;
        s.runs = members.size();
        double psnr_sum = 0.0;
        double time_sum = 0.0;
        s.min_psnr_db = std::numeric_limits<double>::infinity();
        s.max_psnr_db = -std::numeric_limits<double>::infinity();
        for (const auto* r : members) {
            time_sum += r->recovery_seconds;
            if (r->status != "ok") continue;
            ++s.ok;
            psnr_sum += r->psnr_db;
            s.min_psnr_db = std::min(s.min_psnr_db, r->psnr_db);
            s.max_psnr_db = std::max(s.max_psnr_db, r->psnr_db);
        }
        s.mean_seconds = time_sum / static_cast<double>(s.runs);
        if (s.ok == 0) {
            s.mean_psnr_db = s.min_psnr_db = s.max_psnr_db = kNan;
        } else {
            s.mean_psnr_db = psnr_sum / static_cast<double>(s.ok);
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, bool include_timings) {
    out << kSummaryCsvHeader << '\n';
    for (const auto& s : rows) {
        out << s.method << ',' << num(s.normalized_m) << ',' << num(s.noise_std) << ',' << s.runs << ',' << s.ok
            << ',' << num(s.mean_psnr_db) << ',' << num(s.min_psnr_db) << ',' << num(s.max_psnr_db) << ','
            << num(include_timings ? s.mean_seconds : 0.0) << '\n';
    }
}

}  // namespace tensorcs
