// SPDX-License-Identifier: MIT
#pragma once

#include "tensorcs/tensor.hpp"

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace tensorcs {

struct SolverOptions {
    double tol_primal = 1e-7;  ///< relative primal (feasibility / consensus) tolerance
    double tol_dual = 1e-7;    ///< relative dual tolerance
    std::size_t max_iter = 50000;
};

/// min ||z||_1 s.t. ||A z - y||_2 <= epsilon (epsilon == 0: A z = y).
struct L1Problem {
    Matrix a;
    Vector y;
    double epsilon = 0.0;
    SolverOptions options;
};

struct L1Solution {
    Vector z;
    double objective = 0.0;  ///< ||z||_1
    double residual = 0.0;   ///< ||A z - y||_2
    std::size_t iterations = 0;
    bool converged = false;
    /// Optimality was proven through an explicit KKT certificate on the
    /// support of z (rather than inferred from small ADMM residuals).
    bool certified = false;
    /// (||z||_1 - dual bound) / ||z||_1 for a rescaled dual estimate; 0 when
    /// certified, infinity when no feasible point was compared.
    double duality_gap = std::numeric_limits<double>::infinity();
    /// y is farther than epsilon from range(A); z then minimises ||z||_1
    /// over the least-deviation set {z : A^T A z = A^T y}.
    bool infeasible = false;
    std::string diagnostics;
};

/// Reusable l1 engine for one measurement matrix.
///
/// The data-fit set C = {z : ||A z - y|| <= eps} is handled by exact
/// Euclidean projection, using a symmetric eigendecomposition
/// A A^T = Q diag(mu) Q^T computed once at construction (the ball case reduces
/// to a scalar secular equation in the Lagrange multiplier). The outer loop is
/// Douglas-Rachford splitting in ADMM form between the indicator of C and
/// ||.||_1, with residual-balanced penalty updates. Whenever the iterate's
/// support is small enough, a polishing step solves the problem restricted to
/// that support in closed form and checks the KKT conditions; a passing check
/// terminates the solve with an exact answer.
///
/// solve() is const and may be called concurrently from several threads.
class L1Engine {
public:
    explicit L1Engine(Matrix a, SolverOptions options = {});

    [[nodiscard]] L1Solution solve(const Vector& y, double epsilon = 0.0) const;

    [[nodiscard]] const Matrix& matrix() const noexcept { return a_; }
    [[nodiscard]] const SolverOptions& options() const noexcept { return options_; }
    /// ||P_{range(A)^perp} y||_2
    [[nodiscard]] double distance_to_range(const Vector& y) const;
    /// Working-set size of an engine for an m x n matrix.
    [[nodiscard]] static std::size_t footprint_bytes(std::size_t m, std::size_t n);

private:
    struct Workspace;
    void project(const Vector& v, const Vector& y_rot, double epsilon, double floor_sq, Workspace& ws,
                 Vector& out) const;
    bool polish(const Vector& z, const Vector& dual, const Vector& y, double epsilon, Vector& w) const;
    bool polish_on(std::vector<Eigen::Index> support, const Vector& z, const Vector& dual, const Vector& y,
                   double epsilon, Vector& w) const;
    bool simplex_refine(const Vector& z, const Vector& dual, const Vector& y, Vector& w) const;
    [[nodiscard]] std::vector<std::vector<Eigen::Index>> polish_supports(const Vector& z, const Vector& dual) const;

    Matrix a_;
    Matrix b_;        // A^T Q
    Matrix q_;        // eigenvectors of A A^T
    Vector mu_;       // eigenvalues of A A^T
    Vector mu_inv_;   // 1/mu on the range, 0 on the numerical kernel
    std::vector<bool> in_range_;
    SolverOptions options_;
};

/// Basis pursuit, epsilon must be 0.
[[nodiscard]] L1Solution solve_bp(const L1Problem& p);
/// Basis pursuit denoising, epsilon must be > 0.
[[nodiscard]] L1Solution solve_bpdn(const L1Problem& p);

/// Brute-force oracle: least squares on every support of size <= k, keeping
/// the feasible (relative residual <= tol) one of least l1 norm; ties go to
/// the lexicographically smallest support. Refuses more than 1e6 supports.
[[nodiscard]] Vector oracle_solve(const Matrix& a, const Vector& y, std::size_t k, double tol = 1e-9);

/// C_2 = 4 sqrt(1 + delta) / (1 - (1 + sqrt 2) delta), for delta in [0, sqrt 2 - 1).
[[nodiscard]] double c2_constant(double delta_2k);

}  // namespace tensorcs
