#include "lmce/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "lmce/error.hpp"
#include "lmce/geometry.hpp"

namespace lmce {

namespace {

constexpr double kThreeQuarterPi = 0.75 * std::numbers::pi;

// Interior unknown numbering: node (i, j), 1 <= i, j <= n-2.
struct InteriorIndex {
    int n;
    int operator()(int i, int j) const { return (j - 1) * (n - 2) + (i - 1); }
    int count() const { return (n - 2) * (n - 2); }
};

struct DiscreteHessian {
    double a, c, d;
};

DiscreteHessian stencil_hessian(const ScalarField2& u, int i, int j, double h) {
    const double h2 = h * h;
    return {(u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / h2,
            (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (4.0 * h2),
            (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / h2};
}

// arctan l1 + arctan l2 = arg((1 + i l1)(1 + i l2)) = atan2(tr S, 1 - det S)
double operator_value(const DiscreteHessian& s) { return std::atan2(s.a + s.d, 1.0 - (s.a * s.d - s.c * s.c)); }

Eigen::VectorXd residual_vector(const ScalarField2& u, const ScalarField2& phase) {
    const int n = u.grid().nodes_per_axis();
    const double h = u.grid().spacing();
    const InteriorIndex idx{n};
    Eigen::VectorXd F(idx.count());
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) F[idx(i, j)] = operator_value(stencil_hessian(u, i, j, h)) - phase(i, j);
    return F;
}

SparseMatrix assemble_jacobian(const ScalarField2& u) {
    const Grid2& grid = u.grid();
    const int n = grid.nodes_per_axis();
    const double h = grid.spacing();
    const InteriorIndex idx{n};
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(idx.count()) * 9);

    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const DiscreteHessian s = stencil_hessian(u, i, j, h);
            const double g11 = 1.0 + s.a * s.a + s.c * s.c;
            const double g12 = s.c * (s.a + s.d);
            const double g22 = 1.0 + s.d * s.d + s.c * s.c;
            const double det = g11 * g22 - g12 * g12;
            const double q11 = g22 / det, q12 = -g12 / det, q22 = g11 / det;
            if (!(q11 > 0.0) || !(q11 * q22 - q12 * q12 > 0.0)) {
                throw std::logic_error("newton_solve: linearisation lost ellipticity");
            }
            const double cxx = q11 / (h * h), cyy = q22 / (h * h), cxy = 2.0 * q12 / (4.0 * h * h);
            const int row = idx(i, j);
            const auto add = [&](int ii, int jj, double v) {
                if (!grid.is_boundary(ii, jj) && v != 0.0) triplets.emplace_back(row, idx(ii, jj), v);
            };
            add(i, j, -2.0 * cxx - 2.0 * cyy);
            add(i + 1, j, cxx);
            add(i - 1, j, cxx);
            add(i, j + 1, cyy);
            add(i, j - 1, cyy);
            add(i + 1, j + 1, cxy);
            add(i - 1, j - 1, cxy);
            add(i + 1, j - 1, -cxy);
            add(i - 1, j + 1, -cxy);
        }
    }
    SparseMatrix J(idx.count(), idx.count());
    J.setFromTriplets(triplets.begin(), triplets.end());
    return J;
}

// Solves the 5-point Laplace equation with Dirichlet data taken from `data`.
ScalarField2 harmonic_extension(const ScalarField2& data, const LinearSolveOptions& opt) {
    const Grid2& grid = data.grid();
    const int n = grid.nodes_per_axis();
    const InteriorIndex idx{n};
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(idx.count());
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const int row = idx(i, j);
            triplets.emplace_back(row, row, -4.0);
            for (auto [ii, jj] : {std::pair{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}}) {
                if (grid.is_boundary(ii, jj)) {
                    rhs[row] -= data(ii, jj);
                } else {
                    triplets.emplace_back(row, idx(ii, jj), 1.0);
                }
            }
        }
    }
    SparseMatrix A(idx.count(), idx.count());
    A.setFromTriplets(triplets.begin(), triplets.end());
    const LinearSolveResult sol = linear_solve(A, rhs, opt);
    if (!sol.converged) throw std::runtime_error("harmonic_extension: linear solve failed: " + sol.message);
    ScalarField2 out = data;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) out(i, j) = sol.x[idx(i, j)];
    return out;
}

ScalarField2 initial_iterate(const ScalarField2& phase, const ScalarField2& boundary, const LinearSolveOptions& opt) {
    const Grid2& grid = phase.grid();
    const int n = grid.nodes_per_axis();
    // extended-precision sum keeps a constant phase exact, so quadratics start at the solution
    long double sum = 0.0L;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) sum += phase(i, j);
    const double mean = static_cast<double>(sum / static_cast<long double>((n - 2) * (n - 2)));
    const double t = std::tan(0.5 * mean);
    const ScalarField2 q = sample([t](double x, double y) { return 0.5 * t * (x * x + y * y); }, grid);
    ScalarField2 data = boundary;
    for (std::size_t k = 0; k < grid.size(); ++k) data.values()[k] -= q.values()[k];
    ScalarField2 w = harmonic_extension(data, opt);
    for (std::size_t k = 0; k < grid.size(); ++k) w.values()[k] += q.values()[k];
    return w;
}

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const double nb = b.norm();
    const double nr = (A * x - b).norm();
    return nb > 0.0 ? nr / nb : nr;
}

double sup_error(const ScalarField2& a, const ScalarField2& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

}  // namespace

const char* to_string(ProblemRegime r) {
    switch (r) {
        case ProblemRegime::Case1: return "case1";
        case ProblemRegime::Case2: return "case2";
        case ProblemRegime::Subcritical: return "subcritical";
        case ProblemRegime::Mixed: return "mixed";
    }
    return "unknown";
}

ProblemRegime classify_phase(const ScalarField2& phase, double delta) {
    double pmin = phase.min(), pmax = phase.max();
    if (pmax <= -delta) std::tie(pmin, pmax) = std::pair{-pmax, -pmin};
    if (pmin < delta) return ProblemRegime::Subcritical;
    if (pmax <= kThreeQuarterPi + 1e-12) return ProblemRegime::Case1;
    if (pmin > kThreeQuarterPi) return ProblemRegime::Case2;
    return ProblemRegime::Mixed;
}

ManufacturedProblem manufacture(const AnalyticFunction& u, const Grid2& grid, double delta) {
    const ScalarField2 values = sample(u.value, grid);
    SymMat2Field hess{ScalarField2(grid), ScalarField2(grid), ScalarField2(grid)};
    ScalarField2 phase(grid);
    const int n = grid.nodes_per_axis();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto s = u.hessian(grid.coord(i), grid.coord(j));
            const auto [l1, l2] = eigen_sym2(s[0], s[1], s[2]);
            if (std::abs(l1) > 1e150 || std::abs(l2) > 1e150) {
                throw std::invalid_argument("manufacture: Hessian eigenvalue overflow");
            }
            hess.m11(i, j) = s[0];
            hess.m12(i, j) = s[1];
            hess.m22(i, j) = s[2];
            phase(i, j) = std::atan(l1) + std::atan(l2);
        }
    }
    const ProblemRegime regime = classify_phase(phase, delta);
    return {u, values, std::move(hess), std::move(phase), values, regime};
}

LinearSolveResult linear_solve(const SparseMatrix& A, const Eigen::VectorXd& rhs, const LinearSolveOptions& opt) {
    if (A.rows() != A.cols() || A.rows() != rhs.size()) {
        throw std::invalid_argument("linear_solve: dimension mismatch");
    }
    LinearSolveResult res;
    if (rhs.norm() == 0.0) {
        res.x = Eigen::VectorXd::Zero(rhs.size());
        res.converged = true;
        return res;
    }

    if (static_cast<std::size_t>(A.rows()) > opt.direct_threshold) {
        Eigen::SparseMatrix<double> Ac = A;
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
        krylov.preconditioner().setDroptol(1e-4);
        krylov.preconditioner().setFillfactor(10);
        krylov.setTolerance(opt.tolerance);
        krylov.setMaxIterations(opt.max_iterations);
        krylov.compute(Ac);
        if (krylov.info() == Eigen::Success) {
            res.x = krylov.solve(rhs);
            res.iterations = static_cast<int>(krylov.iterations());
            res.method = LinearMethod::Krylov;
            if (res.x.allFinite()) {
                res.relative_residual = relative_residual(A, res.x, rhs);
                // Eigen measures the preconditioned residual; confirm on the true one.
                if (res.relative_residual <= opt.tolerance * 10.0) {
                    res.converged = true;
                    return res;
                }
            }
            res.message = "krylov stagnated after " + std::to_string(res.iterations) +
                          " iterations; fell back to sparse LU. ";
        } else {
            res.message = "incomplete LU failed; fell back to sparse LU. ";
        }
    }

    Eigen::SparseMatrix<double> Ac = A;
    Ac.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(Ac);
    if (lu.info() != Eigen::Success) {
        res.converged = false;
        res.message += "sparse LU factorisation failed: " + lu.lastErrorMessage();
        return res;
    }
    const int krylov_iterations = res.iterations;
    res.x = lu.solve(rhs);
    res.method = LinearMethod::Direct;
    res.iterations = krylov_iterations;
    res.relative_residual = relative_residual(A, res.x, rhs);
    res.converged = res.x.allFinite() && res.relative_residual <= std::max(opt.tolerance, 1e-13) * 10.0;
    if (!res.converged) res.message += "direct solve residual " + std::to_string(res.relative_residual);
    return res;
}

SolveState newton_solve(const ScalarField2& phase, const ScalarField2& boundary, const SolverConfig& cfg) {
    if (!(phase.grid() == boundary.grid())) throw PreconditionError("newton_solve: grid mismatch");
    const Grid2& grid = phase.grid();
    const int n = grid.nodes_per_axis();
    const InteriorIndex idx{n};

    SolveState st{initial_iterate(phase, boundary, cfg.linear), {}, {}, {}, cfg.linear.tolerance, false};
    Eigen::VectorXd F = residual_vector(st.u, phase);
    double norm = F.lpNorm<Eigen::Infinity>();
    st.residual_history.push_back(norm);

    for (int it = 0; it < cfg.max_iterations && norm > cfg.tolerance; ++it) {
        const SparseMatrix J = assemble_jacobian(st.u);
        const LinearSolveResult step = linear_solve(J, -F, cfg.linear);
        if (!step.converged) break;
        st.linear_iterations.push_back(step.iterations);

        double t = 1.0;
        bool accepted = false;
        ScalarField2 trial = st.u;
        for (int k = 0; k <= cfg.max_backtracks; ++k, t *= 0.5) {
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i) trial(i, j) = st.u(i, j) + t * step.x[idx(i, j)];
            Eigen::VectorXd Ft = residual_vector(trial, phase);
            const double trial_norm = Ft.lpNorm<Eigen::Infinity>();
            if (trial_norm <= (1.0 - cfg.armijo * t) * norm) {
                st.u = trial;
                F = std::move(Ft);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        st.damping.push_back(t);
        st.residual_history.push_back(norm);
    }
    st.converged = norm <= cfg.tolerance;
    return st;
}

NewtonSystem newton_system(const ScalarField2& u, const ScalarField2& phase) {
    if (!(u.grid() == phase.grid())) throw PreconditionError("newton_system: grid mismatch");
    return {assemble_jacobian(u), -residual_vector(u, phase)};
}

ScalarField2 newton_initial_iterate(const ScalarField2& phase, const ScalarField2& boundary,
                                    const LinearSolveOptions& opt) {
    if (!(phase.grid() == boundary.grid())) throw PreconditionError("newton_initial_iterate: grid mismatch");
    return initial_iterate(phase, boundary, opt);
}

ScalarField2 phase_residual(const ScalarField2& u, const ScalarField2& phase) {
    if (!(u.grid() == phase.grid())) throw PreconditionError("phase_residual: grid mismatch");
    const Grid2& grid = u.grid();
    const SymMat2Field hess = hessian_fd(u);
    const int n = grid.nodes_per_axis();
    ScalarField2 out(grid);
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const auto [l1, l2] = eigen_sym2(hess.m11(i, j), hess.m12(i, j), hess.m22(i, j));
            out(i, j) = std::atan(l1) + std::atan(l2) - phase(i, j);
        }
    }
    return out;
}

ConvergenceStudy convergence_study(const AnalyticFunction& u, double half_width, const std::vector<int>& ladder,
                                   const SolverConfig& cfg, double delta) {
    if (ladder.size() < 3) throw std::invalid_argument("convergence_study: need at least three grids");
    for (std::size_t k = 1; k < ladder.size(); ++k) {
        if (ladder[k] - 1 != 2 * (ladder[k - 1] - 1)) {
            throw std::invalid_argument("convergence_study: grid spacing must halve between levels");
        }
    }

    ConvergenceStudy study;
    double scale = 0.0;
    for (int n : ladder) {
        const Grid2 grid(half_width, n);
        const ManufacturedProblem prob = manufacture(u, grid, delta);
        const SolveState st = newton_solve(prob.phase, prob.boundary, cfg);
        if (!st.converged) {
            throw NonConvergenceError("convergence_study: Newton did not converge on n=" + std::to_string(n));
        }
        const Vec2Field du = gradient_fd(st.u);
        const SymMat2Field d2u = hessian_fd(st.u);
        const ScalarField2 du1 = sample([&](double x, double y) { return u.gradient(x, y)[0]; }, grid);
        const ScalarField2 du2 = sample([&](double x, double y) { return u.gradient(x, y)[1]; }, grid);
        ConvergenceLevel lvl;
        lvl.n = n;
        lvl.h = grid.spacing();
        lvl.error_u = sup_error(st.u, prob.u_exact);
        lvl.error_du = std::max(sup_error(du.x1, du1), sup_error(du.x2, du2));
        lvl.error_d2u = std::max({sup_error(d2u.m11, prob.hessian_exact.m11), sup_error(d2u.m12, prob.hessian_exact.m12),
                                  sup_error(d2u.m22, prob.hessian_exact.m22)});
        lvl.newton_iterations = st.iterations();
        study.levels.push_back(lvl);
        scale = std::max(scale, prob.u_exact.max_abs());
    }

    const auto order = [&](double coarse, double fine) {
        if (coarse <= 1e-9 * (1.0 + scale) || fine <= 1e-11 * (1.0 + scale)) {
            study.orders_defined = false;
            return std::numeric_limits<double>::quiet_NaN();
        }
        return std::log2(coarse / fine);
    };
    for (std::size_t k = 1; k < study.levels.size(); ++k) {
        const auto& a = study.levels[k - 1];
        const auto& b = study.levels[k];
        study.order_u.push_back(order(a.error_u, b.error_u));
        study.order_du.push_back(order(a.error_du, b.error_du));
        study.order_d2u.push_back(order(a.error_d2u, b.error_d2u));
    }
    return study;
}

}  // namespace lmce
