// SPDX-License-Identifier: MIT
// Python bindings. Tensors cross the boundary as Fortran-ordered float64
// numpy arrays, so element (i1, ..., id) lines up on both sides.

#include "tensorcs/dct.hpp"
#include "tensorcs/decomp.hpp"
#include "tensorcs/error.hpp"
#include "tensorcs/l1solver.hpp"
#include "tensorcs/pipeline.hpp"
#include "tensorcs/recovery.hpp"
#include "tensorcs/sensing.hpp"
#include "tensorcs/tensor.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
namespace tc = tensorcs;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

tc::DenseTensor to_tensor(const FArray& a) {
    if (a.ndim() == 0) throw tc::InvalidArgument("tensor must have at least one mode");
    tc::Dims dims(a.shape(), a.shape() + a.ndim());
    std::vector<double> data(a.data(), a.data() + a.size());
    return {std::move(dims), std::move(data)};
}

FArray to_array(const tc::DenseTensor& x) {
    std::vector<py::ssize_t> shape(x.dims().begin(), x.dims().end());
    FArray out(shape);
    std::copy(x.data().begin(), x.data().end(), out.mutable_data());
    return out;
}

tc::MeasurementEnsemble ensemble_from(const std::vector<tc::Matrix>& matrices) {
    return tc::MeasurementEnsemble::from_matrices(matrices);
}

tc::SolverOptions solver_options(double tol, std::size_t max_iter) { return {tol, tol, max_iter}; }

py::dict solution_dict(const tc::L1Solution& s) {
    py::dict d;
    d["z"] = s.z;
    d["objective"] = s.objective;
    d["residual"] = s.residual;
    d["iterations"] = s.iterations;
    d["converged"] = s.converged;
    d["certified"] = s.certified;
    d["infeasible"] = s.infeasible;
    d["diagnostics"] = s.diagnostics;
    return d;
}

py::dict report_dict(const tc::RecoveryReport& r) {
    py::dict d;
    d["estimate"] = to_array(r.estimate);
    d["method"] = r.method;
    d["epsilon"] = r.epsilon;
    d["error_bound"] = r.error_bound ? py::cast(*r.error_bound) : py::none();
    d["term_count"] = r.term_count;
    d["kept_terms"] = r.kept_terms;
    d["truncated"] = r.truncated;
    d["total_seconds"] = r.total_seconds;
    py::list stages;
    for (const auto& s : r.stages) {
        py::dict st;
        st["mode"] = s.mode;
        st["subproblems"] = s.subproblem_count;
        st["max_residual"] = s.max_residual;
        st["max_iterations"] = s.max_iterations;
        st["tolerance"] = s.tolerance;
        st["relaxed"] = s.relaxed;
        stages.append(st);
    }
    d["stages"] = stages;
    d["notes"] = r.notes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mode-wise compressed sensing of sparse tensors";

    // InvalidArgument derives from std::invalid_argument and surfaces as ValueError
    py::register_exception<tc::ContractMismatch>(m, "ContractMismatch", PyExc_ValueError);
    py::register_exception<tc::BudgetExceeded>(m, "BudgetExceeded", PyExc_MemoryError);
    py::register_exception<tc::NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);
    py::register_exception<tc::IoError>(m, "IoError", PyExc_OSError);

    // tensor algebra
    m.def(
        "mode_product",
        [](const FArray& x, const tc::Matrix& u, std::size_t mode) {
            return to_array(tc::mode_product(to_tensor(x), u, mode));
        },
        py::arg("x"), py::arg("u"), py::arg("mode"), "x x_mode u (modes are 0-based)");
    m.def(
        "unfold", [](const FArray& x, std::size_t mode) { return tc::unfold(to_tensor(x), mode); }, py::arg("x"),
        py::arg("mode"));
    m.def(
        "fold",
        [](const tc::Matrix& a, std::size_t mode, const tc::Dims& dims) { return to_array(tc::fold(a, mode, dims)); },
        py::arg("a"), py::arg("mode"), py::arg("dims"));
    m.def(
        "kronecker_chain", [](const std::vector<tc::Matrix>& us) { return tc::kronecker_chain(us); },
        py::arg("matrices"), "U_d kron ... kron U_1");

    // sensing
    m.def(
        "generate_ensemble",
        [](const tc::Dims& dims, const std::vector<std::size_t>& per_mode_m, const std::string& distribution,
           std::uint64_t seed) {
            return tc::generate_ensemble(dims, per_mode_m, tc::distribution_from_string(distribution), seed)
                .matrices;
        },
        py::arg("dims"), py::arg("per_mode_m"), py::arg("distribution") = "gaussian", py::arg("seed") = 0);
    m.def(
        "sample",
        [](const FArray& x, const std::vector<tc::Matrix>& matrices) {
            return to_array(tc::sample(to_tensor(x), ensemble_from(matrices)));
        },
        py::arg("x"), py::arg("matrices"));
    m.def(
        "add_noise",
        [](const FArray& y, double stddev, std::uint64_t seed) {
            const auto n = tc::add_noise(to_tensor(y), stddev, seed);
            return py::make_tuple(to_array(n.observation), n.epsilon);
        },
        py::arg("y"), py::arg("stddev"), py::arg("seed") = 0, "returns (noisy observation, noise norm)");
    m.def(
        "plan_measurements",
        [](const tc::Dims& dims, std::size_t k, double c) {
            const auto p = tc::plan_measurements(dims, k, c);
            py::dict d;
            d["per_mode_m"] = p.per_mode_m;
            d["clamped"] = p.clamped;
            d["total_m_gtcs"] = p.total_m_gtcs;
            d["total_m_kcs"] = p.total_m_kcs;
            d["gtcs_ratio_worse"] = p.gtcs_ratio_worse;
            return d;
        },
        py::arg("dims"), py::arg("k"), py::arg("c") = 1.0);
    m.def("check_nsp_exhaustive", &tc::check_nsp_exhaustive, py::arg("a"), py::arg("k"));

    // l1 solvers
    m.def(
        "solve_bp",
        [](const tc::Matrix& a, const tc::Vector& y, double tol, std::size_t max_iter) {
            return solution_dict(tc::solve_bp({a, y, 0.0, solver_options(tol, max_iter)}));
        },
        py::arg("a"), py::arg("y"), py::arg("tol") = tc::SolverOptions{}.tol_primal,
        py::arg("max_iter") = tc::SolverOptions{}.max_iter);
    m.def(
        "solve_bpdn",
        [](const tc::Matrix& a, const tc::Vector& y, double epsilon, double tol, std::size_t max_iter) {
            return solution_dict(tc::solve_bpdn({a, y, epsilon, solver_options(tol, max_iter)}));
        },
        py::arg("a"), py::arg("y"), py::arg("epsilon"), py::arg("tol") = tc::SolverOptions{}.tol_primal,
        py::arg("max_iter") = tc::SolverOptions{}.max_iter);
    m.def("oracle_solve", &tc::oracle_solve, py::arg("a"), py::arg("y"), py::arg("k"), py::arg("tol") = 1e-9);
    m.def("c2_constant", &tc::c2_constant, py::arg("delta_2k"));

    // decompositions
    m.def(
        "svd",
        [](const tc::Matrix& a) {
            const auto s = tc::svd(a);
            return py::make_tuple(s.left, s.singular_values, s.right);
        },
        py::arg("a"), "returns (U, s, V) with A = U diag(s) V^T");
    m.def(
        "weak_tucker_decompose",
        [](const FArray& y, double rank_tol) {
            const auto w = tc::weak_tucker_decompose(to_tensor(y), rank_tol);
            return py::make_tuple(w.terms, w.weights);
        },
        py::arg("y"), py::arg("rank_tol") = 0.0, "returns (terms, weights); terms[i][j] is the mode-j factor of term i");

    // recovery
    m.def(
        "recover",
        [](const std::string& method, const FArray& observation, const std::vector<tc::Matrix>& matrices,
           std::size_t k, double epsilon, std::optional<double> delta_2k, bool relax_stages, std::size_t threads,
           std::size_t memory_budget_bytes, double tol, std::size_t max_iter) {
            tc::RecoveryProblem p;
            p.observation = to_tensor(observation);
            p.ensemble = ensemble_from(matrices);
            p.k = k;
            p.epsilon = epsilon;
            p.delta_2k = delta_2k;
            p.relax_stages = relax_stages;
            p.threads = threads;
            p.memory_budget_bytes = memory_budget_bytes;
            p.solver = solver_options(tol, max_iter);
            tc::RecoveryReport r;
            {
                py::gil_scoped_release release;
                r = tc::recover(tc::method_from_string(method), p);
            }
            return report_dict(r);
        },
        py::arg("method"), py::arg("observation"), py::arg("matrices"), py::arg("k"), py::arg("epsilon") = 0.0,
        py::arg("delta_2k") = py::none(), py::arg("relax_stages") = false, py::arg("threads") = 0,
        py::arg("memory_budget_bytes") = tc::kDefaultMemoryBudget, py::arg("tol") = tc::SolverOptions{}.tol_primal,
        py::arg("max_iter") = tc::SolverOptions{}.max_iter);
    m.def("kcs_required_bytes", &tc::kcs_required_bytes, py::arg("signal_dims"), py::arg("measurement_dims"));

    // DCT and metrics
    m.def("dct_matrix", &tc::dct_matrix, py::arg("n"));
    m.def(
        "dct_forward", [](const FArray& x) { return to_array(tc::dct_forward(to_tensor(x))); }, py::arg("x"));
    m.def(
        "dct_inverse", [](const FArray& c) { return to_array(tc::dct_inverse(to_tensor(c))); }, py::arg("c"));
    m.def(
        "dct_sparsify",
        [](const FArray& x, const tc::Dims& keep) { return to_array(tc::dct_sparsify(to_tensor(x), keep)); },
        py::arg("x"), py::arg("keep"));
    m.def(
        "psnr",
        [](const FArray& reference, const FArray& candidate, double peak) {
            return tc::psnr(to_tensor(reference), to_tensor(candidate), peak);
        },
        py::arg("reference"), py::arg("candidate"), py::arg("peak") = 255.0);
    m.attr("PSNR_CAP") = tc::kPsnrCap;

#ifdef VERSION_INFO
#define TENSORCS_STR_(x) #x
#define TENSORCS_STR(x) TENSORCS_STR_(x)
    m.attr("__version__") = TENSORCS_STR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
