// SPDX-License-Identifier: MIT
#include "tensorcs/l1solver.hpp"

#include "tensorcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace tensorcs {

namespace {

constexpr double kRangeCutoff = 1e-12;  // relative to the largest eigenvalue of A A^T
constexpr std::size_t kBalanceEvery = 10;
constexpr std::size_t kPolishEvery = 20;
constexpr double kBalanceRatio = 10.0;
// Penalty changes stop after this many, so the tail runs with a fixed rho
// (varying rho indefinitely can cycle).
constexpr std::size_t kMaxBalances = 40;
constexpr double kCertificateSlack = 1e-9;
constexpr double kActiveBand = 1e-3;
constexpr int kPrunePasses = 4;
constexpr int kGrowPasses = 4;
constexpr double kPruneRelative = 1e-9;
constexpr double kRankRelative = 1e-10;
constexpr double kSimplexGap = 1e-4;       // gap below which simplex refinement is tried
constexpr std::size_t kSimplexEvery = 500;  // minimum iterations between refinement attempts
// Polish and simplex attempts are spaced so their cost stays comparable to the
// iterations in between: one iteration costs ~4mn flops, a polish ~16mk^2
// (k = support size) and a simplex attempt ~43m^3.
constexpr double kPolishCostRatio = 4.0;
constexpr double kSimplexCostRatio = 11.0;
constexpr int kSimplexPivots = 64;

void soft_threshold(const Vector& in, double kappa, Vector& out) {
    out = in.unaryExpr([kappa](double v) {
        if (v > kappa) return v - kappa;
        if (v < -kappa) return v + kappa;
        return 0.0;
    });
}

// Least squares on a block of columns that must have full column rank.
// Blocked Householder QR without pivoting; a tiny diagonal entry of R flags
// numerical rank deficiency.
bool full_rank_least_squares(const Matrix& as, const Vector& y, Vector& w) {
    if (as.cols() == 0 || as.cols() > as.rows()) return false;
    const Eigen::HouseholderQR<Matrix> qr(as);
    const Vector diag = qr.matrixQR().diagonal().cwiseAbs();
    if (!(diag.minCoeff() > kRankRelative * diag.maxCoeff())) return false;
    w = qr.solve(y);
    return true;
}

std::vector<Eigen::Index> support_of(const Vector& z) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z(i) != 0.0) s.push_back(i);
    }
    return s;
}

Matrix gather_columns(const Matrix& a, const std::vector<Eigen::Index>& cols) {
    Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
    return out;
}

// max_{i not in support} |a_i^T r|
double off_support_correlation(const Matrix& a, const std::vector<Eigen::Index>& support, const Vector& r) {
    std::vector<bool> on(static_cast<std::size_t>(a.cols()), false);
    for (auto i : support) on[static_cast<std::size_t>(i)] = true;
    const Vector corr = a.transpose() * r;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        if (!on[static_cast<std::size_t>(i)]) worst = std::max(worst, std::abs(corr(i)));
    }
    return worst;
}

}  // namespace

struct L1Engine::Workspace {
    Vector c;
    Vector coeff;
};

L1Engine::L1Engine(Matrix a, SolverOptions options) : a_(std::move(a)), options_(options) {
    if (a_.rows() == 0 || a_.cols() == 0) throw InvalidArgument("L1Engine: empty measurement matrix");
    if (!a_.allFinite()) throw InvalidArgument("L1Engine: measurement matrix has non-finite entries");
    if (options_.tol_primal <= 0.0 || options_.tol_dual <= 0.0) throw InvalidArgument("L1Engine: tolerances must be positive");

    const Matrix gram = a_ * a_.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericalFailure("L1Engine: eigendecomposition of A A^T failed");
    q_ = eig.eigenvectors();
    mu_ = eig.eigenvalues();
    const double mu_max = std::max(mu_.maxCoeff(), 0.0);
    b_ = a_.transpose() * q_;
    mu_inv_ = Vector::Zero(mu_.size());
    in_range_.assign(static_cast<std::size_t>(mu_.size()), false);
    for (Eigen::Index j = 0; j < mu_.size(); ++j) {
        if (mu_max > 0.0 && mu_(j) > kRangeCutoff * mu_max) {
            in_range_[static_cast<std::size_t>(j)] = true;
            mu_inv_(j) = 1.0 / mu_(j);
        } else {
            b_.col(j).setZero();
        }
    }
}

std::size_t L1Engine::footprint_bytes(std::size_t m, std::size_t n) {
    return sizeof(double) * (2 * m * n + 2 * m * m);
}

double L1Engine::distance_to_range(const Vector& y) const {
    const Vector rot = q_.transpose() * y;
    double sq = 0.0;
    for (Eigen::Index j = 0; j < rot.size(); ++j) {
        if (!in_range_[static_cast<std::size_t>(j)]) sq += rot(j) * rot(j);
    }
    return std::sqrt(sq);
}

void L1Engine::project(const Vector& v, const Vector& y_rot, double epsilon, double floor_sq, Workspace& ws,
                       Vector& out) const {
    ws.c.noalias() = b_.transpose() * v;
    ws.c -= y_rot;
    const double target = epsilon * epsilon - floor_sq;
    if (target <= 0.0) {
        // Equality constraint, or a ball that does not reach range(A).
        ws.coeff = mu_inv_.cwiseProduct(ws.c);
    } else {
        if (ws.c.squaredNorm() <= epsilon * epsilon) {
            out = v;
            return;
        }
        // phi(lambda) = sum_range c_j^2 / (1 + lambda mu_j)^2 = target. Newton on
        // 1/sqrt(phi), which is concave and increasing, converges monotonically
        // from lambda = 0.
        double lambda = 0.0;
        for (int it = 0; it < 100; ++it) {
            double phi = 0.0;
            double dphi = 0.0;
            for (Eigen::Index j = 0; j < mu_.size(); ++j) {
                if (!in_range_[static_cast<std::size_t>(j)]) continue;
                const double denom = 1.0 + lambda * mu_(j);
                const double c2 = ws.c(j) * ws.c(j);
                phi += c2 / (denom * denom);
                dphi -= 2.0 * mu_(j) * c2 / (denom * denom * denom);
            }
            if (std::abs(phi - target) <= 1e-14 * target || dphi == 0.0) break;
            const double h = 1.0 / std::sqrt(phi) - 1.0 / std::sqrt(target);
            const double dh = -0.5 * dphi / (phi * std::sqrt(phi));
            const double next = lambda - h / dh;
            if (!(next > lambda)) break;
            lambda = next;
        }
        ws.coeff.resize(mu_.size());
        for (Eigen::Index j = 0; j < mu_.size(); ++j) {
            ws.coeff(j) = in_range_[static_cast<std::size_t>(j)] ? lambda * ws.c(j) / (1.0 + lambda * mu_(j)) : 0.0;
        }
    }
    out = v;
    out.noalias() -= b_ * ws.coeff;
}

// Supports worth polishing on: the exact support of z; z's support joined
// with the coordinates where the dual estimate is nearly active (the optimum's
// support lies in {i : |a_i^T nu| = 1}); and the A.rows() largest entries of z.
std::vector<std::vector<Eigen::Index>> L1Engine::polish_supports(const Vector& z, const Vector& dual) const {
    std::vector<std::vector<Eigen::Index>> out;
    auto exact = support_of(z);
    if (exact.empty()) return out;
    const auto rows = static_cast<std::size_t>(a_.rows());
    if (exact.size() <= rows) out.push_back(exact);

    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z(i) != 0.0 || std::abs(dual(i)) >= 1.0 - kActiveBand) active.push_back(i);
    }
    if (active.size() <= rows && active != exact) out.push_back(std::move(active));

    if (exact.size() > rows / 2) {
        std::vector<Eigen::Index> order(exact);
        std::sort(order.begin(), order.end(), [&z](Eigen::Index i, Eigen::Index j) {
            return std::abs(z(i)) > std::abs(z(j)) || (std::abs(z(i)) == std::abs(z(j)) && i < j);
        });
        order.resize(std::min(order.size(), rows));
        std::sort(order.begin(), order.end());
        if (order != exact) out.push_back(std::move(order));
    }
    return out;
}

bool L1Engine::polish(const Vector& z, const Vector& dual, const Vector& y, double epsilon, Vector& w) const {
    for (const auto& support : polish_supports(z, dual)) {
        if (polish_on(support, z, dual, y, epsilon, w)) return true;
    }
    return false;
}

bool L1Engine::polish_on(std::vector<Eigen::Index> support, const Vector& z, const Vector& dual, const Vector& y,
                         double epsilon, Vector& w) const {
    if (support.empty() || support.size() > static_cast<std::size_t>(a_.rows())) return false;
    Matrix as = gather_columns(a_, support);
    Vector w_ls;
    if (!full_rank_least_squares(as, y, w_ls)) return false;
    if (epsilon == 0.0) {
        // A support that almost fits y usually lacks a coordinate the iterates
        // are only slowly admitting; add the columns most correlated with the
        // least-squares residual until the fit is exact.
        for (int pass = 0; pass < kGrowPasses && (y - as * w_ls).norm() > options_.tol_primal; ++pass) {
            if (support.size() >= static_cast<std::size_t>(a_.rows())) return false;
            const Vector corr = a_.transpose() * (y - as * w_ls);
            std::vector<bool> on(static_cast<std::size_t>(a_.cols()), false);
            for (auto i : support) on[static_cast<std::size_t>(i)] = true;
            Eigen::Index best = -1;
            double best_score = 0.0;
            for (Eigen::Index i = 0; i < a_.cols(); ++i) {
                const double norm = a_.col(i).norm();
                if (on[static_cast<std::size_t>(i)] || norm == 0.0) continue;
                const double score = std::abs(corr(i)) / norm;
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            if (best < 0) return false;
            support.insert(std::upper_bound(support.begin(), support.end(), best), best);
            as = gather_columns(a_, support);
            if (!full_rank_least_squares(as, y, w_ls)) return false;
        }
        // Drop coordinates the fit leaves negligible or whose sign contradicts
        // the dual estimate, as long as the reduced support still fits y.
        for (int pass = 0; pass < kPrunePasses; ++pass) {
            const double top = w_ls.cwiseAbs().maxCoeff();
            std::vector<Eigen::Index> kept;
            for (std::size_t j = 0; j < support.size(); ++j) {
                const double v = w_ls(static_cast<Eigen::Index>(j));
                const double hint = z(support[j]) != 0.0 ? z(support[j]) : dual(support[j]);
                if (std::abs(v) > kPruneRelative * top && v * hint > 0.0) kept.push_back(support[j]);
            }
            if (kept.size() == support.size() || kept.empty()) break;
            Matrix as_k = gather_columns(a_, kept);
            Vector w_k;
            if (!full_rank_least_squares(as_k, y, w_k)) break;
            if ((y - as_k * w_k).norm() > options_.tol_primal) break;
            support = std::move(kept);
            as = std::move(as_k);
            w_ls = w_k;
        }
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    const Vector r_ls = y - as * w_ls;
    const Eigen::LDLT<Matrix> gram(as.transpose() * as);

    Vector ws;
    bool certified = false;
    if (epsilon == 0.0) {
        if (r_ls.norm() > options_.tol_primal) return false;
        if ((w_ls.array() == 0.0).any()) return false;
        ws = w_ls;
        const Vector signs = ws.array().sign().matrix();
        // Dual candidate nu with A_S^T nu = sign(w_S): start from the ADMM
        // multiplier mapped into range(A), then fix the on-support rows.
        const Vector a_dual = a_ * dual;
        const Vector nu0 = q_ * mu_inv_.cwiseProduct(q_.transpose() * a_dual);
        const Vector nu = nu0 + as * gram.solve(signs - as.transpose() * nu0);
        certified = off_support_correlation(a_, support, nu) <= 1.0 + kCertificateSlack;
        if (!certified) {
            const Vector nu_min = as * gram.solve(signs);
            certified = off_support_correlation(a_, support, nu_min) <= 1.0 + kCertificateSlack;
        }
    } else {
        const double rr = r_ls.squaredNorm();
        if (rr >= epsilon * epsilon) return false;
        Vector signs(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto i = support[static_cast<std::size_t>(j)];
            signs(j) = (z(i) != 0.0 ? z(i) : dual(i)) > 0 ? 1.0 : -1.0;
        }
        const Vector g = gram.solve(signs);
        const double q = signs.dot(g);
        if (!(q > 0.0)) return false;
        const double t = std::sqrt((epsilon * epsilon - rr) / q);
        ws = w_ls - t * g;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (ws(j) * signs(j) <= 0.0) return false;
        }
        const Vector res = y - as * ws;
        certified = off_support_correlation(a_, support, res) <= t * (1.0 + kCertificateSlack);
    }
    w = Vector::Zero(a_.cols());
    for (Eigen::Index j = 0; j < k; ++j) w(support[static_cast<std::size_t>(j)]) = ws(j);
    return certified;
}

// Revised simplex on min ||z||_1, Az = y, started from a square basis made of
// z's support topped up with the columns whose dual correlation is largest.
// The ADMM iterate is usually one or two exchanges from an optimal vertex,
// which grow and prune alone cannot reach. Returns true with w set when an
// optimal basis is found within kSimplexPivots pivots.
bool L1Engine::simplex_refine(const Vector& z, const Vector& dual, const Vector& y, Vector& w) const {
    const auto m = a_.rows();
    const auto n = a_.cols();
    if (m > n || std::find(in_range_.begin(), in_range_.end(), false) != in_range_.end()) return false;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        const bool zi = z(i) != 0.0;
        const bool zj = z(j) != 0.0;
        if (zi != zj) return zi;
        return zi ? std::abs(z(i)) > std::abs(z(j)) : std::abs(dual(i)) > std::abs(dual(j));
    });
    std::vector<Eigen::Index> basis(order.begin(), order.begin() + m);
    Matrix b = gather_columns(a_, basis);
    if (Eigen::FullPivLU<Matrix>(b).rank() < m) return false;
    std::vector<bool> in_basis(static_cast<std::size_t>(n), false);
    for (auto i : basis) in_basis[static_cast<std::size_t>(i)] = true;

    for (int pivot = 0; pivot <= kSimplexPivots; ++pivot) {
        const Eigen::PartialPivLU<Matrix> lu(b);
        const Vector wb = lu.solve(y);
        const double tiny = 1e-12 * std::max(1.0, wb.cwiseAbs().maxCoeff());
        Vector cost(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto i = basis[static_cast<std::size_t>(j)];
            const double hint = std::abs(wb(j)) > tiny ? wb(j) : (z(i) != 0.0 ? z(i) : dual(i));
            cost(j) = hint < 0.0 ? -1.0 : 1.0;
        }
        const Vector nu = lu.transpose().solve(cost);
        const Vector g = a_.transpose() * nu;
        Eigen::Index enter = -1;
        double worst = 1.0 + kCertificateSlack;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!in_basis[static_cast<std::size_t>(i)] && std::abs(g(i)) > worst) {
                worst = std::abs(g(i));
                enter = i;
            }
        }
        if (enter < 0) {
            if ((b * wb - y).norm() > options_.tol_primal) return false;
            w = Vector::Zero(n);
            for (Eigen::Index j = 0; j < m; ++j) {
                if (std::abs(wb(j)) > tiny) w(basis[static_cast<std::size_t>(j)]) = wb(j);
            }
            return true;
        }
        if (pivot == kSimplexPivots) break;

        // Moving z_enter by t sign(g) changes the basic values by t d; the
        // first basic value driven to zero leaves.
        const Vector d = -(g(enter) > 0.0 ? 1.0 : -1.0) * lu.solve(a_.col(enter));
        Eigen::Index leave = -1;
        double step = std::numeric_limits<double>::infinity();
        double leave_d = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (cost(j) * d(j) >= -1e-14) continue;
            const double t = std::max(0.0, std::abs(wb(j)) <= tiny ? 0.0 : std::abs(wb(j) / d(j)));
            if (t < step || (t == step && std::abs(d(j)) > leave_d)) {
                step = t;
                leave = j;
                leave_d = std::abs(d(j));
            }
        }
        if (leave < 0) return false;
        in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = false;
        in_basis[static_cast<std::size_t>(enter)] = true;
        basis[static_cast<std::size_t>(leave)] = enter;
        b.col(leave) = a_.col(enter);
    }
    return false;
}

L1Solution L1Engine::solve(const Vector& y, double epsilon) const {
    if (y.size() != a_.rows()) {
        throw InvalidArgument("L1Engine::solve: y has length " + std::to_string(y.size()) + " but A has " +
                              std::to_string(a_.rows()) + " rows");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("L1Engine::solve: epsilon must be finite and >= 0");
    if (!y.allFinite()) throw InvalidArgument("L1Engine::solve: y has non-finite entries");

    const auto n = a_.cols();
    L1Solution sol;
    const double scale = y.norm();
    if (scale == 0.0 || epsilon >= scale) {
        sol.z = Vector::Zero(n);
        sol.residual = scale;
        sol.converged = true;
        sol.certified = true;
        sol.diagnostics = scale == 0.0 ? "zero observation" : "epsilon covers the observation";
        return sol;
    }

    // Work on the normalised problem ||y|| = 1; the solution map is
    // positively homogeneous in (y, epsilon).
    const Vector ys = y / scale;
    const double eps = epsilon / scale;
    const Vector y_rot = q_.transpose() * ys;
    double floor_sq = 0.0;
    for (Eigen::Index j = 0; j < y_rot.size(); ++j) {
        if (!in_range_[static_cast<std::size_t>(j)]) floor_sq += y_rot(j) * y_rot(j);
    }
    const double floor = std::sqrt(floor_sq);
    sol.infeasible = epsilon == 0.0 ? floor > options_.tol_primal : floor >= eps;
    const double proj_eps = sol.infeasible ? 0.0 : eps;

    Workspace ws;
    Vector x(n);
    Vector z = Vector::Zero(n);
    Vector u = Vector::Zero(n);
    Vector z_old(n);
    Vector v(n);
    Vector candidate;

    project(Vector::Zero(n), y_rot, proj_eps, floor_sq, ws, x);
    const double x_inf = x.cwiseAbs().maxCoeff();
    double rho = x_inf > 0.0 ? 10.0 / x_inf : 1.0;

    // Relative duality gap of the best feasible point seen so far. The ADMM
    // multiplier rho u approximates A^T nu; rescaling nu to ||A^T nu||_inf = 1
    // makes it dual feasible, so y^T nu - eps ||nu|| bounds the optimum below.
    const double feas_limit = proj_eps == 0.0 ? options_.tol_primal : proj_eps * (1.0 + 1e-9);
    Vector feasible;
    double gap = std::numeric_limits<double>::infinity();
    const auto gap_check = [&]() {
        const Vector nu = q_ * mu_inv_.cwiseProduct(q_.transpose() * (a_ * (rho * u)));
        const double inf_norm = (a_.transpose() * nu).cwiseAbs().maxCoeff();
        if (!(inf_norm > 0.0)) return false;
        const Vector nu_feasible = nu / inf_norm;
        const double lower = ys.dot(nu_feasible) - proj_eps * nu_feasible.norm();
        const Vector* primal = &x;
        if (candidate.size() == n && (a_ * candidate - ys).norm() <= feas_limit &&
            candidate.lpNorm<1>() < x.lpNorm<1>()) {
            primal = &candidate;
        }
        const double upper = primal->lpNorm<1>();
        const double g = upper > 0.0 ? std::max(0.0, (upper - lower) / upper) : 0.0;
        if (g < gap) {
            gap = g;
            feasible = *primal;
        }
        return gap <= options_.tol_dual;
    };

    bool done = false;
    bool certified = false;
    std::size_t balances = 0;
    const auto cols = static_cast<double>(n);
    const auto rows = static_cast<double>(a_.rows());
    const std::size_t simplex_every =
        std::max<std::size_t>(kSimplexEvery, static_cast<std::size_t>(kSimplexCostRatio * rows * rows / cols));
    std::size_t next_polish = 0;
    std::size_t next_simplex = simplex_every;
    std::size_t it = 0;
    for (; it < options_.max_iter && !done; ++it) {
        v = z - u;
        project(v, y_rot, proj_eps, floor_sq, ws, x);
        z_old = z;
        soft_threshold(x + u, 1.0 / rho, z);
        u += x - z;

        const double r = (x - z).norm();
        const double s = rho * (z - z_old).norm();
        const double eps_pri = options_.tol_primal * std::max(x.norm(), z.norm()) + 1e-15;
        const double eps_dual = options_.tol_dual * rho * u.norm() + 1e-15;
        if (r <= eps_pri && s <= eps_dual) {
            done = true;
            break;
        }
        if ((it + 1) % kPolishEvery == 0 && !sol.infeasible) {
            if (it + 1 >= next_polish) {
                const auto k = static_cast<double>(support_of(z).size());
                next_polish = it + 1 + std::max<std::size_t>(kPolishEvery, static_cast<std::size_t>(kPolishCostRatio * k * k / cols));
                candidate.resize(0);
                if (polish(z, rho * u, ys, proj_eps, candidate)) {
                    certified = true;
                    done = true;
                    break;
                }
            }
            if (gap_check()) {
                done = true;
                break;
            }
            if (proj_eps == 0.0 && gap <= kSimplexGap && it + 1 >= next_simplex) {
                next_simplex = it + 1 + simplex_every;
                candidate.resize(0);
                if (simplex_refine(z, rho * u, ys, candidate)) {
                    certified = true;
                    done = true;
                    break;
                }
            }
        }
        if ((it + 1) % kBalanceEvery == 0 && balances < kMaxBalances) {
            const double pr = r / eps_pri;
            const double du = s / eps_dual;
            if (pr > kBalanceRatio * du) {
                rho *= 2.0;
                u *= 0.5;
                ++balances;
            } else if (du > kBalanceRatio * pr) {
                rho *= 0.5;
                u *= 2.0;
                ++balances;
            }
        }
    }
    sol.iterations = std::min(it + 1, options_.max_iter);

    Vector best = x;
    bool gap_closed = false;
    if (certified) {
        best = candidate;
        gap = 0.0;
    } else if (!sol.infeasible) {
        // Final polish even without a certificate: keep it when it is feasible
        // and no worse than the ADMM iterate.
        candidate.resize(0);
        certified = polish(z, rho * u, ys, proj_eps, candidate);
        if (certified) {
            best = candidate;
            gap = 0.0;
        } else {
            gap_closed = gap_check();
            if (feasible.size() == n) best = feasible;
        }
    }

    sol.z = scale * best;
    sol.objective = sol.z.lpNorm<1>();
    sol.residual = (a_ * sol.z - y).norm();
    sol.certified = certified;
    sol.duality_gap = gap;
    sol.converged = done || certified || gap_closed;
    std::ostringstream diag;
    diag << (sol.converged ? "converged" : "iteration limit reached") << " after " << sol.iterations
         << " iterations";
    if (certified) {
        diag << " (KKT certified)";
    } else if (std::isfinite(gap)) {
        diag << " (relative duality gap " << gap << ")";
    }
    if (sol.infeasible) diag << "; observation is " << floor * scale << " from range(A), beyond epsilon";
    sol.diagnostics = diag.str();
    return sol;
}

L1Solution solve_bp(const L1Problem& p) {
    if (p.epsilon != 0.0) throw InvalidArgument("solve_bp: epsilon must be 0 (use solve_bpdn)");
    if (p.a.rows() != p.y.size()) throw InvalidArgument("solve_bp: A.rows() != len(y)");
    return L1Engine(p.a, p.options).solve(p.y, 0.0);
}

L1Solution solve_bpdn(const L1Problem& p) {
    if (!(p.epsilon > 0.0)) throw InvalidArgument("solve_bpdn: epsilon must be positive");
    if (p.a.rows() != p.y.size()) throw InvalidArgument("solve_bpdn: A.rows() != len(y)");
    return L1Engine(p.a, p.options).solve(p.y, p.epsilon);
}

Vector oracle_solve(const Matrix& a, const Vector& y, std::size_t k, double tol) {
    if (a.rows() != y.size()) throw InvalidArgument("oracle_solve: A.rows() != len(y)");
    const auto n = static_cast<std::size_t>(a.cols());
    const double feas = tol * std::max(1.0, y.norm());
    if (k == 0 || y.norm() <= feas) {
        if (y.norm() <= feas) return Vector::Zero(a.cols());
        throw NumericalFailure("oracle_solve: no 0-sparse solution for nonzero y");
    }
    k = std::min(k, n);

    // Budget: sum_{j <= k} C(n, j).
    double count = 0.0;
    double binom = 1.0;
    for (std::size_t j = 1; j <= k; ++j) {
        binom = binom * static_cast<double>(n - j + 1) / static_cast<double>(j);
        count += binom;
    }
    if (count > 1e6) throw InvalidArgument("oracle_solve: more than 1e6 supports to enumerate");

    bool found = false;
    Vector best;
    double best_l1 = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> best_support;

    for (std::size_t size = 1; size <= k; ++size) {
        std::vector<Eigen::Index> idx(size);
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        while (true) {
            const Matrix as = gather_columns(a, idx);
            Eigen::ColPivHouseholderQR<Matrix> qr(as);
            if (qr.rank() == static_cast<Eigen::Index>(size)) {
                const Vector w = qr.solve(y);
                if ((as * w - y).norm() <= feas) {
                    const double l1 = w.lpNorm<1>();
                    const double tie = 1e-12 * std::max(1.0, best_l1);
                    const bool better = !found || l1 < best_l1 - tie ||
                                        (std::abs(l1 - best_l1) <= tie &&
                                         std::lexicographical_compare(idx.begin(), idx.end(), best_support.begin(),
                                                                      best_support.end()));
                    if (better) {
                        found = true;
                        best_l1 = l1;
                        best_support = idx;
                        best = Vector::Zero(a.cols());
                        for (std::size_t j = 0; j < size; ++j) best(idx[j]) = w(static_cast<Eigen::Index>(j));
                    }
                }
            }
            // Next combination in lexicographic order.
            std::size_t pos = size;
            while (pos > 0 && static_cast<std::size_t>(idx[pos - 1]) == n - size + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    if (!found) throw NumericalFailure("oracle_solve: no feasible solution with at most k nonzeros");
    return best;
}

double c2_constant(double delta_2k) {
    const double limit = std::sqrt(2.0) - 1.0;
    if (!(delta_2k >= 0.0) || !(delta_2k < limit)) {
        throw InvalidArgument("c2_constant: delta_2k must lie in [0, sqrt(2) - 1)");
    }
    return 4.0 * std::sqrt(1.0 + delta_2k) / (1.0 - (1.0 + std::sqrt(2.0)) * delta_2k);
}

}  // namespace tensorcs
