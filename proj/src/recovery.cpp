// SPDX-License-Identifier: MIT
#include "tensorcs/recovery.hpp"

#include "tensorcs/decomp.hpp"
#include "tensorcs/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace tensorcs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void validate(const RecoveryProblem& p, bool noisy, std::string_view name) {
    const auto where = std::string(name) + ": ";
    if (p.ensemble.order() == 0) throw InvalidArgument(where + "empty ensemble");
    if (p.ensemble.order() != p.observation.order()) {
        throw ContractMismatch(where + "ensemble has " + std::to_string(p.ensemble.order()) +
                               " matrices for an observation of order " + std::to_string(p.observation.order()));
    }
    if (p.ensemble.measurement_dims() != p.observation.dims()) {
        throw ContractMismatch(where + "observation dims do not match the ensemble's measurement dims");
    }
    if (p.k < 1) throw InvalidArgument(where + "k must be >= 1");
    if (!std::isfinite(p.epsilon) || p.epsilon < 0.0) throw InvalidArgument(where + "epsilon must be finite and >= 0");
    if (noisy && p.epsilon == 0.0) throw InvalidArgument(where + "noisy recovery needs epsilon > 0");
    if (!noisy && p.epsilon != 0.0) throw InvalidArgument(where + "noiseless recovery needs epsilon == 0");
    if (!p.per_mode_k.empty()) {
        if (p.per_mode_k.size() != p.ensemble.order()) {
            throw InvalidArgument(where + "per_mode_k needs one entry per mode");
        }
        if (std::ranges::find(p.per_mode_k, std::size_t{0}) != p.per_mode_k.end()) {
            throw InvalidArgument(where + "per_mode_k entries must be >= 1");
        }
    }
}

void require_order(const RecoveryProblem& p, std::size_t d, std::string_view name) {
    if (p.observation.order() != d) {
        throw ContractMismatch(std::string(name) + ": expects a " + std::to_string(d) + "-mode observation, got " +
                               std::to_string(p.observation.order()));
    }
}

double c2_or_default(const RecoveryProblem& p) {
    return p.delta_2k ? c2_constant(*p.delta_2k) : c2_constant(0.0);
}

void attach_bound(const RecoveryProblem& p, RecoveryReport& r) {
    r.epsilon = p.epsilon;
    if (p.delta_2k && p.epsilon > 0.0) {
        r.error_bound = std::pow(c2_constant(*p.delta_2k), static_cast<double>(p.observation.order())) * p.epsilon;
    }
}

struct Batch {
    Matrix z;
    double max_residual = 0.0;
    std::size_t max_iterations = 0;
    bool any_infeasible = false;
};

// Solves A z_c = rhs_c (or ||A z_c - rhs_c|| <= tol) for every column.
Batch solve_columns(const L1Engine& engine, const Matrix& rhs, double tol, std::size_t threads, std::size_t mode) {
    const auto cols = static_cast<std::size_t>(rhs.cols());
    auto sols = parallel_map<L1Solution>(
        cols, [&](std::size_t c) { return engine.solve(rhs.col(static_cast<Eigen::Index>(c)), tol); }, threads);
    Batch b;
    b.z.resize(engine.matrix().cols(), rhs.cols());
    for (std::size_t c = 0; c < cols; ++c) {
        const auto& s = sols[c];
        if (!s.converged) {
            throw StageFailure("mode " + std::to_string(mode) + ", column " + std::to_string(c) + ": " + s.diagnostics,
                               mode);
        }
        b.z.col(static_cast<Eigen::Index>(c)) = s.z;
        b.max_residual = std::max(b.max_residual, s.residual);
        b.max_iterations = std::max(b.max_iterations, s.iterations);
        b.any_infeasible = b.any_infeasible || s.infeasible;
    }
    return b;
}

// Mode-by-mode recovery; `noisy` selects the BPDN tolerance schedule.
RecoveryReport serial_recover(const RecoveryProblem& p, bool noisy, std::string_view name) {
    const auto t0 = Clock::now();
    RecoveryReport r;
    r.method = std::string(name);
    const std::size_t d = p.observation.order();
    const double c2 = noisy ? c2_or_default(p) : 0.0;
    if (noisy && !p.delta_2k) r.notes.emplace_back("delta_2k not given; tolerance schedule uses C2 = 4");

    DenseTensor cur = p.observation;
    for (std::size_t s = 0; s < d; ++s) {
        const auto ts = Clock::now();
        const Matrix rhs = unfold(cur, s);
        const L1Engine engine(p.ensemble.matrices[s], p.solver);
        double tol = 0.0;
        if (noisy) {
            tol = std::pow(c2, static_cast<double>(s)) * p.epsilon / std::sqrt(static_cast<double>(rhs.cols()));
        } else if (p.relax_stages && s > 0) {
            tol = 10.0 * p.solver.tol_primal * frobenius_norm(cur);
        }
        StageReport st;
        st.mode = s;
        st.subproblem_count = static_cast<std::size_t>(rhs.cols());
        st.relaxed = !noisy && tol > 0.0;
        Batch b = solve_columns(engine, rhs, tol, p.threads, s);
        if (b.any_infeasible && noisy) {
            tol *= std::sqrt(2.0);
            st.relaxed = true;
            r.notes.push_back("mode " + std::to_string(s) + ": tolerance relaxed by sqrt(2)");
            b = solve_columns(engine, rhs, tol, p.threads, s);
        }
        if (b.any_infeasible) {
            throw StageFailure("mode " + std::to_string(s) + ": subproblem infeasible at tolerance " +
                                   std::to_string(tol),
                               s);
        }
        st.tolerance = tol;
        st.max_residual = b.max_residual;
        st.max_iterations = b.max_iterations;
        Dims next = cur.dims();
        next[s] = p.ensemble.matrices[s].cols();
        cur = fold(b.z, s, next);
        st.seconds = seconds_since(ts);
        r.stages.push_back(st);
    }
    r.estimate = std::move(cur);
    attach_bound(p, r);
    r.total_seconds = seconds_since(t0);
    return r;
}

// Recovers every factor of `dec` with the matching mode engine and sums the
// rank-one terms in term order. weights[i] scales term i after recovery.
RecoveryReport factor_recover(const RecoveryProblem& p, const WeakDecomposition& dec, double tol,
                              const std::vector<double>& weights, std::string_view name,
                              std::chrono::steady_clock::time_point t0) {
    RecoveryReport r;
    r.method = std::string(name);
    const std::size_t d = p.observation.order();
    const std::size_t terms = dec.size();

    std::vector<L1Engine> engines;
    engines.reserve(d);
    for (std::size_t j = 0; j < d; ++j) engines.emplace_back(p.ensemble.matrices[j], p.solver);

    struct Task {
        L1Solution sol;
        double seconds = 0.0;
    };
    auto results = parallel_map<Task>(
        terms * d,
        [&](std::size_t t) {
            const auto ts = Clock::now();
            Task out{engines[t % d].solve(dec.terms[t / d][t % d], tol), 0.0};
            out.seconds = seconds_since(ts);
            return out;
        },
        p.threads);

    r.stages.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        r.stages[j].mode = j;
        r.stages[j].subproblem_count = terms;
        r.stages[j].tolerance = tol;
    }
    for (std::size_t t = 0; t < results.size(); ++t) {
        const auto& s = results[t].sol;
        const std::size_t i = t / d;
        const std::size_t j = t % d;
        if (!s.converged || s.infeasible) {
            throw StageFailure("term " + std::to_string(i) + ", mode " + std::to_string(j) + ": " + s.diagnostics, j,
                               i);
        }
        auto& st = r.stages[j];
        st.max_residual = std::max(st.max_residual, s.residual);
        st.max_iterations = std::max(st.max_iterations, s.iterations);
        st.seconds += results[t].seconds;
    }

    Dims out_dims = p.ensemble.signal_dims();
    DenseTensor est(out_dims);
    std::vector<Vector> factors(d);
    for (std::size_t i = 0; i < terms; ++i) {
        for (std::size_t j = 0; j < d; ++j) factors[j] = results[i * d + j].sol.z;
        DenseTensor term = outer(factors);
        if (weights[i] != 1.0) term *= weights[i];
        est += term;
    }
    r.estimate = std::move(est);
    r.term_count = terms;
    r.kept_terms = terms;
    attach_bound(p, r);
    r.total_seconds = seconds_since(t0);
    return r;
}

std::size_t term_cap(const RecoveryProblem& p) {
    return p.per_mode_k.empty() ? p.k : *std::ranges::max_element(p.per_mode_k);
}

double factor_tolerance(const RecoveryProblem& p, bool matrix) {
    const double k = static_cast<double>(p.k);
    bool use_matrix = matrix;
    if (p.factor_tolerance == FactorTolerance::matrix_rule) use_matrix = true;
    if (p.factor_tolerance == FactorTolerance::tensor_rule) use_matrix = false;
    return use_matrix ? p.epsilon / std::sqrt(2.0 * k) : p.epsilon / (2.0 * k);
}

RecoveryReport parallel_recover(const RecoveryProblem& p, std::string_view name) {
    const auto t0 = Clock::now();
    const auto dec = weak_tucker_decompose(p.observation);
    return factor_recover(p, dec, 0.0, std::vector<double>(dec.size(), 1.0), name, t0);
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::csm_s: return "csm_s";
        case Method::csm_p: return "csm_p";
        case Method::gtcs_s: return "gtcs_s";
        case Method::gtcs_p: return "gtcs_p";
        case Method::kcs: return "kcs";
    }
    return "gtcs_s";
}

Method method_from_string(std::string_view s) {
    for (auto m : {Method::csm_s, Method::csm_p, Method::gtcs_s, Method::gtcs_p, Method::kcs}) {
        if (to_string(m) == s) return m;
    }
    throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

RecoveryReport csm_s(const RecoveryProblem& p) {
    validate(p, false, "csm_s");
    require_order(p, 2, "csm_s");
    return serial_recover(p, false, "csm_s");
}

RecoveryReport gtcs_s(const RecoveryProblem& p) {
    validate(p, false, "gtcs_s");
    return serial_recover(p, false, "gtcs_s");
}

RecoveryReport csm_p(const RecoveryProblem& p) {
    validate(p, false, "csm_p");
    require_order(p, 2, "csm_p");
    return parallel_recover(p, "csm_p");
}

RecoveryReport gtcs_p(const RecoveryProblem& p) {
    validate(p, false, "gtcs_p");
    if (p.observation.order() < 2) throw ContractMismatch("gtcs_p: needs an observation of order >= 2");
    return parallel_recover(p, "gtcs_p");
}

RecoveryReport csm_s_noisy(const RecoveryProblem& p) {
    validate(p, true, "csm_s_noisy");
    require_order(p, 2, "csm_s_noisy");
    return serial_recover(p, true, "csm_s_noisy");
}

RecoveryReport gtcs_s_noisy(const RecoveryProblem& p) {
    validate(p, true, "gtcs_s_noisy");
    return serial_recover(p, true, "gtcs_s_noisy");
}

RecoveryReport csm_p_noisy(const RecoveryProblem& p) {
    validate(p, true, "csm_p_noisy");
    require_order(p, 2, "csm_p_noisy");
    const auto t0 = Clock::now();
    const Matrix y = p.observation.to_matrix();
    const SvdResult s = svd(y);
    const std::size_t above = numerical_rank(y, p.epsilon / std::sqrt(static_cast<double>(p.k)));
    const std::size_t kept = std::min({term_cap(p), above, s.rank()});

    WeakDecomposition dec;
    dec.dims = p.observation.dims();
    std::vector<double> weights;
    for (std::size_t i = 0; i < kept; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double sigma = s.singular_values(ii);
        dec.terms.push_back({sigma * s.left.col(ii), sigma * s.right.col(ii)});
        dec.weights.push_back(sigma);
        weights.push_back(1.0 / sigma);
    }
    auto r = factor_recover(p, dec, factor_tolerance(p, true), weights, "csm_p_noisy", t0);
    r.term_count = s.rank();
    r.kept_terms = kept;
    r.truncated = kept < s.rank();
    if (r.truncated) {
        r.notes.push_back("kept " + std::to_string(kept) + " of " + std::to_string(s.rank()) + " singular triplets");
    }
    return r;
}

RecoveryReport gtcs_p_noisy(const RecoveryProblem& p) {
    validate(p, true, "gtcs_p_noisy");
    if (p.observation.order() < 2) throw ContractMismatch("gtcs_p_noisy: needs an observation of order >= 2");
    if (p.observation.order() == 2 && p.factor_tolerance != FactorTolerance::tensor_rule) {
        auto r = csm_p_noisy(p);
        r.method = "gtcs_p_noisy";
        return r;
    }
    const auto t0 = Clock::now();
    const auto full = weak_tucker_decompose(p.observation);
    const auto dec =
        weak_tucker_decompose(p.observation, p.epsilon / std::sqrt(static_cast<double>(p.k)), term_cap(p));
    auto r = factor_recover(p, dec, factor_tolerance(p, p.observation.order() == 2),
                            std::vector<double>(dec.size(), 1.0), "gtcs_p_noisy", t0);
    r.term_count = full.size();
    r.kept_terms = dec.size();
    r.truncated = dec.size() < full.size();
    if (r.truncated) {
        r.notes.push_back("kept " + std::to_string(dec.size()) + " of " + std::to_string(full.size()) +
                          " decomposition terms");
    }
    return r;
}

std::size_t kcs_required_bytes(const Dims& signal_dims, const Dims& measurement_dims) {
    const std::size_t n = element_count(signal_dims);
    const std::size_t m = element_count(measurement_dims);
    return 8 * m * n + L1Engine::footprint_bytes(m, n);
}

RecoveryReport kcs_recover(const RecoveryProblem& p) {
    const bool noisy = p.epsilon > 0.0;
    validate(p, noisy, "kcs");
    const auto t0 = Clock::now();
    const std::size_t need = kcs_required_bytes(p.ensemble.signal_dims(), p.ensemble.measurement_dims());
    if (need > p.memory_budget_bytes) {
        throw BudgetExceeded("kcs: needs " + std::to_string(need) + " bytes, budget is " +
                                 std::to_string(p.memory_budget_bytes),
                             need);
    }
    const L1Engine engine(kronecker_chain(p.ensemble.matrices), p.solver);
    const Vector y = p.observation.vec();
    const auto sol = engine.solve(y, p.epsilon);
    if (!sol.converged || sol.infeasible) throw StageFailure("kcs: " + sol.diagnostics, 0);

    RecoveryReport r;
    r.method = noisy ? "kcs_noisy" : "kcs";
    StageReport st;
    st.subproblem_count = 1;
    st.max_residual = sol.residual;
    st.max_iterations = sol.iterations;
    st.tolerance = p.epsilon;
    r.estimate = DenseTensor(p.ensemble.signal_dims(), std::vector<double>(sol.z.data(), sol.z.data() + sol.z.size()));
    attach_bound(p, r);
    r.total_seconds = seconds_since(t0);
    st.seconds = r.total_seconds;
    r.stages.push_back(st);
    return r;
}

RecoveryReport recover(Method method, const RecoveryProblem& p) {
    const bool noisy = p.epsilon > 0.0;
    switch (method) {
        case Method::csm_s: return noisy ? csm_s_noisy(p) : csm_s(p);
        case Method::csm_p: return noisy ? csm_p_noisy(p) : csm_p(p);
        case Method::gtcs_s: return noisy ? gtcs_s_noisy(p) : gtcs_s(p);
        case Method::gtcs_p: return noisy ? gtcs_p_noisy(p) : gtcs_p(p);
        case Method::kcs: return kcs_recover(p);
    }
    throw InvalidArgument("recover: unknown method");
}

bool verify_rank_preservation(const DenseTensor& x, const MeasurementEnsemble& ensemble) {
    if (x.order() != 2 || ensemble.order() != 2) throw InvalidArgument("verify_rank_preservation: needs d = 2");
    const Matrix xm = x.to_matrix();
    const Matrix ym = ensemble.matrices[0] * xm * ensemble.matrices[1].transpose();
    const auto rank_at = [](const Matrix& a) {
        const auto s = svd(a);
        if (s.rank() == 0) return std::size_t{0};
        return numerical_rank(a, 1e-8 * s.singular_values(0));
    };
    return rank_at(xm) == rank_at(ym);
}

}  // namespace tensorcs
