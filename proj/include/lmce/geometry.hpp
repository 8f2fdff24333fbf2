#pragma once

#include <array>
#include <utility>

#include "lmce/grid.hpp"

namespace lmce {

/// Ordered eigenvalues (lambda1 >= lambda2) of [[m11, m12], [m12, m22]].
/// Throws std::invalid_argument on non-finite entries.
std::pair<double, double> eigen_sym2(double m11, double m12, double m22);

/// Per-node geometry of the gradient graph (x, Du(x)).
///
/// lambda1 is always the larger Hessian eigenvalue. metric is g = I + (D^2u)^2,
/// inverse_metric its inverse, volume V = sqrt((1 + lambda1^2)(1 + lambda2^2))
/// from the eigenvalues and sqrt_det_g the same quantity from the metric
/// components. phase = arctan(lambda1) + arctan(lambda2).
struct GeometryBundle {
    SymMat2Field hessian;
    ScalarField2 lambda1;
    ScalarField2 lambda2;
    ScalarField2 phase;
    ScalarField2 sigma1;
    ScalarField2 sigma2;
    ScalarField2 volume;
    SymMat2Field metric;
    SymMat2Field inverse_metric;
    ScalarField2 sqrt_det_g;
    /// ln sqrt(1 + lambda1^2)
    ScalarField2 slope;

    const Grid2& grid() const { return lambda1.grid(); }
};

struct SlopeConstants {
    double delta = 0.3;   ///< supercritical margin: phase >= delta
    double A = 0.0;       ///< weight of the quadratic added to the slope
    double c = 0.5;       ///< gradient coefficient in the Jacobi inequality
    double C = 0.0;       ///< additive Jacobi constant
    double gap_rel = 1e-6;  ///< nodes with lambda1 - lambda2 < gap_rel (1 + |lambda1|) are treated as coalesced

    /// Throws std::invalid_argument when a field is outside its range.
    void validate() const;
    bool coalesced(double lambda1, double lambda2) const;
};

/// Geometry from the finite-difference Hessian of u.
GeometryBundle bundle(const ScalarField2& u);
/// Geometry from a given Hessian field (analytic or otherwise).
GeometryBundle bundle_from_hessian(const SymMat2Field& hessian);

/// |grad_g f|^2 = g^{ij} f_i f_j, with f_i from gradient_fd.
ScalarField2 grad_g_norm2(const ScalarField2& f, const GeometryBundle& B);

/// Divergence-form Laplace-Beltrami operator (1/sqrt g) d_i(sqrt g g^{ij} d_j f).
///
/// Interior nodes use half-node fluxes for the diagonal terms and centred
/// fluxes for the mixed terms, which gives exact discrete summation by parts
/// against fields vanishing near the grid boundary. On the outer ring the node
/// fluxes are differenced with the one-sided stencils of gradient_fd.
ScalarField2 laplace_beltrami(const ScalarField2& f, const GeometryBundle& B);

/// Non-divergence form g^{ij} f_ij + (1/sqrt g) d_i(sqrt g g^{ij}) f_j, used as
/// a cross-check on laplace_beltrami.
ScalarField2 laplace_beltrami_nondivergence(const ScalarField2& f, const GeometryBundle& B);

struct MeanCurvature {
    /// Ambient components (x1, x2, y1, y2) of J grad_g psi on R^2 x R^2.
    std::array<ScalarField2, 4> vector;
    /// |H| = sqrt(g^{ij} psi_i psi_j)
    ScalarField2 norm;
};

/// Mean curvature vector H = J grad_g psi of the graph. With v = g^{-1} D psi
/// the tangential lift of grad_g psi is (v, D^2u v), and J(x, y) = (-y, x).
MeanCurvature mean_curvature(const GeometryBundle& B, const ScalarField2& psi);

ScalarField2 slope(const GeometryBundle& B);
/// slope + (A/2)|x|^2
ScalarField2 modified_slope(const GeometryBundle& B, const SlopeConstants& K);

}  // namespace lmce
