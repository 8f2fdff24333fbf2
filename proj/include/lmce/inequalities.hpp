#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmce/geometry.hpp"
#include "lmce/grid.hpp"

namespace lmce {

/// Outcome of an inequality check LHS <= RHS. pass <=> margin >= -slack, with
/// margin = RHS - LHS, unless the check states an extra condition.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double slack = 0.0;
    bool pass = false;
    /// Fitted or derived constants, in insertion order.
    std::vector<std::pair<std::string, double>> constants;
    /// Nodes dropped by the eigengap filter (or subdomains skipped as degenerate).
    int excluded = 0;
    std::string note;

    double constant(const std::string& key) const;
};

enum class Regime { Case1, Case2 };

const char* to_string(Regime r);

/// Draws `trials` random sub-rectangles and sub-disks of B_radius and compares
/// the maximum over interior nodes with the maximum over the boundary band
/// (nodes within 1.5h of the subdomain edge). A trial passes when
/// interior max <= band max + 2 h Lip(f), Lip(f) = max |Df| on B_radius.
/// Subdomains too small to have both interior and band nodes are skipped and
/// counted in `excluded`. The reported margin is the worst over trials.
InequalityReport check_weak_max_principle(const ScalarField2& f, int trials, std::uint64_t seed,
                                          double radius = 2.0);

/// ||f||_{L^inf(B1)} <= int_{B2} |Df| + int_{B2} f, plus quadrature slack
/// 20 h * 4 pi * (sup_{B2} f + sup_{B2} |Df|).
/// Throws PreconditionError when f < 0 somewhere in B2 or when f fails the
/// weak-maximum-principle check with the given trials and seed.
InequalityReport check_super_iso(const ScalarField2& f, int trials = 200, std::uint64_t seed = 0);

struct JacobiOptions {
    /// Nodes in B_radius (and at least two nodes from the grid edge) are tested.
    double radius = 3.0;
    /// C_budget = budget_factor * (1 + ||psi||_{C^{1,1}}) over the tested region.
    double budget_factor = 10.0;
};

/// Fits the smallest C_hat >= 0 with Lap_g b >= c |grad_g b|^2 - C_hat on the
/// tested nodes. Coalesced eigenvalues are skipped unless the whole 5x5 stencil
/// is coalesced (an umbilic patch, where b is smooth). Constants: "m" (the minimum
/// of Lap_g b - c|grad_g b|^2), "C_hat", "budget", "psi_c11".
/// Throws PreconditionError when every node is excluded.
InequalityReport check_jacobi_pointwise(const GeometryBundle& B, const SlopeConstants& K,
                                        const JacobiOptions& opt = {});

struct SubharmonicOptions {
    double radius = 2.0;
    /// Weight of (A/2)|x|^2; fitted to the smallest admissible value when empty.
    std::optional<double> A;
    double slack = 1e-4;
    int trials = 200;
    std::uint64_t seed = 0;
};

/// Subharmonicity of b~ = b + (A/2)|x|^2 on B_radius, followed by the weak
/// maximum principle on b~. Constants report the three pieces of
/// Lap_g b~ = Lap_g b + A tr(g^-1) + A x.Lap_g x separately ("lap_b_min",
/// "trace_term_min", "drift_term_min"), plus "A_hat", "A" and "min_lap".
/// Throws PreconditionError when psi < delta somewhere on the region.
InequalityReport check_subharmonic_modified_slope(const GeometryBundle& B, const SlopeConstants& K,
                                                  const SubharmonicOptions& opt = {});

/// Integral Jacobi inequality on the cutoff's support,
///   int_{B_{r1}} |grad_g b|^2 dv_g <= (4/c^2) int |grad_g phi|^2 dv_g + (2/c) int phi^2 C_hat dv_g,
/// with C_hat fitted by check_jacobi_pointwise on B_{r2}. Also checks the
/// discrete integration by parts
///   sum phi^2 Lap_g b dv_g = - sum <2 phi grad_g phi, grad_g b> dv_g
/// to 10 h ("ibp_residual"). Both must hold for pass.
InequalityReport check_jacobi_integral(const GeometryBundle& B, const CutoffProfile& phi, const SlopeConstants& K);

/// Volume bounds on the normalised ball B_4 (needs L >= 4).
///
/// Case1 (delta <= psi <= 3pi/4 on B4): node-wise V <= Lap u / sin(delta)
/// with zero slack; reports C2 fitted from int_{B2} V = (C2 / sin delta) ||Du||_{B3}.
/// Case2 (psi > 3pi/4 on B4): asserts int_{B3} V <= sqrt2 pi ||Du||^2_{B3}
/// (|sec psi| <= sqrt2 times the area of the gradient image) and reports the
/// literal reading int_{B3} V <= sqrt2 ||Du||^2_{B4} without asserting it.
/// Throws PreconditionError on regime/phase mismatch.
InequalityReport check_volume_bound(const ScalarField2& u, const GeometryBundle& B, Regime regime, double delta);

/// Smallest C >= 0 with hessian_norm <= C exp(C * gradient_term), by bisection.
double fit_estimate_constant(double hessian_norm, double gradient_term);

/// Hessian estimate harness on B_R: L = |D^2u(0)| (spectral norm), G =
/// sup_{B_R} |Du| / R (Case1) or its square (Case2), and the fitted C*.
/// A negative phase is handled through u -> -u. The regime is inferred from
/// the phase on B_R when not given. pass <=> C* <= budget.
/// Throws PreconditionError when the phase on B_R is not supercritical for
/// delta or disagrees with the requested regime, when R > L, or when the
/// origin is not a grid node.
InequalityReport check_hessian_estimate(const ScalarField2& u, double R, std::optional<Regime> regime,
                                        double delta = 0.3, double budget = 5.0);

}  // namespace lmce
