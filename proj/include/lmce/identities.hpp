#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmce/geometry.hpp"
#include "lmce/grid.hpp"

namespace lmce {

enum class ToleranceClass { Algebraic, Differencing };

const char* to_string(ToleranceClass c);

/// Outcome of an identity check. pass <=> max_residual <= tolerance.
struct IdentityReport {
    std::string name;
    double max_residual = 0.0;
    int at_i = -1;
    int at_j = -1;
    double at_x1 = 0.0;
    double at_x2 = 0.0;
    double tolerance = 0.0;
    ToleranceClass tolerance_class = ToleranceClass::Algebraic;
    bool pass = false;
    /// Secondary quantities (named), in insertion order.
    std::vector<std::pair<std::string, double>> details;

    double detail(const std::string& key) const;
};

/// Default C in the C h^2 tolerances of differencing-class checks.
inline constexpr double kDifferencingConstant = 10.0;

/// Compares the arctangent form against cos(psi) Lap u + sin(psi)(det D^2u - 1).
///
/// R1 = arctan l1 + arctan l2 - psi and R2 is the product-form residual, both
/// with the finite-difference Hessian of u. Since R2 = V sin(R1) node-wise the
/// check asserts max|R2| <= (1 + max V) max|R1| + C h^2. max|R1| is reported
/// as the detail "r1_max". Throws PreconditionError on grid mismatch.
IdentityReport check_form_equivalence(const ScalarField2& u, const ScalarField2& psi,
                                      double C = kDifferencingConstant);

/// (1 - sigma2, sigma1) = V (cos psi, sin psi), to 1e-12 (1 + max V).
IdentityReport check_complex_factorization(const GeometryBundle& B);

/// V = sigma1 / sin(psi) on nodes with sin(psi) >= sin(delta).
/// Throws PreconditionError if some node has psi outside (0, pi).
IdentityReport check_volume_formula(const GeometryBundle& B, double delta);

/// Node-wise |grad_g phi|^2 V <= |D phi|^2 (2 cos psi + sigma1 sin psi) + C h^2.
///
/// The right-hand side equals tr(g^-1) |D phi|^2 V when psi is the phase of the
/// bundle, and the inequality becomes equality in the frame diagonalising D^2u.
/// When `psi` is supplied it is used on the right-hand side; a supplied phase
/// that differs from the bundle's by more than `phase_tolerance` means the
/// bundle is not a solution for it and PreconditionError is thrown.
IdentityReport check_cutoff_volume_identity(const GeometryBundle& B, const CutoffProfile& phi,
                                            const std::optional<ScalarField2>& psi = std::nullopt,
                                            double C = kDifferencingConstant, double phase_tolerance = 1e-3);

/// b <= V node-wise.
IdentityReport check_slope_volume(const GeometryBundle& B);

/// Laplace-Beltrami of the coordinate functions against the tangential part of
/// the mean curvature vector: Lap_g x_k = -(D^2u g^-1 D psi)_k. In a frame
/// diagonalising D^2u this reads -lambda_k g^{kk} psi_k. Checked on interior
/// nodes (two-node margin) inside B_radius, tolerance C h^2.
IdentityReport check_coordinate_laplacian(const GeometryBundle& B, const ScalarField2& psi, double radius,
                                          double C = kDifferencingConstant);

}  // namespace lmce
