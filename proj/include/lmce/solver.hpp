#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "lmce/analytic.hpp"
#include "lmce/grid.hpp"

namespace lmce {

enum class ProblemRegime { Case1, Case2, Subcritical, Mixed };

const char* to_string(ProblemRegime r);

/// Exact solution pair: u_exact solves arctan l1 + arctan l2 = phase by
/// construction, with the phase taken from the analytic Hessian.
struct ManufacturedProblem {
    AnalyticFunction exact;
    ScalarField2 u_exact;
    SymMat2Field hessian_exact;
    ScalarField2 phase;
    /// Dirichlet data; the solver reads only the outer ring.
    ScalarField2 boundary;
    ProblemRegime regime;
};

/// Regime of a phase field: Case1 when delta <= psi <= 3pi/4, Case2 when
/// psi > 3pi/4 (by |psi| when the phase is negative throughout), Subcritical
/// when some |psi| < delta, Mixed otherwise.
ProblemRegime classify_phase(const ScalarField2& phase, double delta);

/// Samples u, takes the phase from the analytic Hessian and tags the regime
/// with classify_phase. Throws std::invalid_argument when an analytic eigenvalue overflows.
ManufacturedProblem manufacture(const AnalyticFunction& u, const Grid2& grid, double delta = 0.3);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class LinearMethod { Direct, Krylov };

struct LinearSolveOptions {
    double tolerance = 1e-12;
    int max_iterations = 1000;
    /// Systems with at most this many unknowns go straight to the sparse LU.
    std::size_t direct_threshold = 4096;
};

struct LinearSolveResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    LinearMethod method = LinearMethod::Direct;
    bool converged = false;
    std::string message;
};

/// Solves A x = rhs to relative residual `tolerance`. Larger systems use
/// BiCGSTAB with an incomplete-LU preconditioner and fall back to sparse LU
/// when the Krylov iteration breaks down or stagnates; the message records why.
LinearSolveResult linear_solve(const SparseMatrix& A, const Eigen::VectorXd& rhs, const LinearSolveOptions& opt = {});

struct SolverConfig {
    double tolerance = 1e-10;  ///< sup-norm of the phase residual
    int max_iterations = 50;
    double armijo = 1e-4;
    int max_backtracks = 30;
    LinearSolveOptions linear;
};

struct SolveState {
    ScalarField2 u;
    /// Sup-norm residual of every iterate, starting with the initial one.
    std::vector<double> residual_history;
    /// Accepted step length of every Newton step.
    std::vector<double> damping;
    std::vector<int> linear_iterations;
    double linear_tolerance = 0.0;
    bool converged = false;

    int iterations() const { return static_cast<int>(damping.size()); }
};

/// Damped Newton for arctan l1 + arctan l2 = psi at interior nodes with
/// Dirichlet data from `boundary`.
///
/// The Jacobian of the discrete operator is g^{11} D11 + 2 g^{12} D12 + g^{22} D22
/// with g^{ij} the inverse metric of the iterate. The initial iterate is the
/// quadratic of mean phase, t|x|^2/2 with t = tan(mean psi / 2), corrected by
/// the discrete harmonic extension of the remaining boundary data. Steps are
/// damped by Armijo backtracking on the residual sup-norm.
/// Throws PreconditionError on grid mismatch and std::logic_error if the
/// linearisation ever loses ellipticity.
SolveState newton_solve(const ScalarField2& phase, const ScalarField2& boundary, const SolverConfig& cfg = {});

/// Linear system J s = -F of one Newton step at iterate u, over interior
/// nodes numbered (j - 1)(n - 2) + (i - 1).
struct NewtonSystem {
    SparseMatrix jacobian;
    Eigen::VectorXd rhs;
};

NewtonSystem newton_system(const ScalarField2& u, const ScalarField2& phase);

/// The quadratic-of-mean-phase plus harmonic-extension start used by newton_solve.
ScalarField2 newton_initial_iterate(const ScalarField2& phase, const ScalarField2& boundary,
                                    const LinearSolveOptions& opt = {});

/// arctan l1 + arctan l2 - psi at interior nodes (zero on the outer ring),
/// recomputed from hessian_fd and eigen_sym2.
ScalarField2 phase_residual(const ScalarField2& u, const ScalarField2& phase);

struct ConvergenceLevel {
    int n = 0;
    double h = 0.0;
    double error_u = 0.0;
    double error_du = 0.0;
    double error_d2u = 0.0;
    int newton_iterations = 0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceLevel> levels;
    /// log2(e_h / e_{h/2}) between consecutive levels; NaN when undefined.
    std::vector<double> order_u;
    std::vector<double> order_du;
    std::vector<double> order_d2u;
    /// False when the errors sit at round-off and orders carry no information.
    bool orders_defined = true;
};

/// Manufactures, solves and measures sup-norm errors of u, Du and D^2u on a
/// ladder of grids over [-L, L]^2 whose spacing halves at every level.
/// Throws std::invalid_argument for a bad ladder and NonConvergenceError when
/// a level fails to converge.
ConvergenceStudy convergence_study(const AnalyticFunction& u, double half_width, const std::vector<int>& ladder,
                                   const SolverConfig& cfg = {}, double delta = 0.3);

}  // namespace lmce
