#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lmce/analytic.hpp"
#include "lmce/error.hpp"
#include "lmce/geometry.hpp"
#include "lmce/identities.hpp"
#include "lmce/solver.hpp"

using namespace lmce;

namespace {

constexpr double kPi = std::numbers::pi;

GeometryBundle bundle_of(const AnalyticFunction& u, const Grid2& g) { return bundle(sample(u.value, g)); }

}  // namespace

TEST(FormEquivalence, ExactCases) {
    const Grid2 g(4.0, 33);
    const IdentityReport q = check_form_equivalence(sample(quadratic_family(1.0).value, g), ScalarField2(g, kPi / 2));
    EXPECT_TRUE(q.pass);
    EXPECT_LT(q.max_residual, 1e-12);
    EXPECT_LT(q.detail("r1_max"), 1e-12);
    EXPECT_EQ(q.tolerance_class, ToleranceClass::Differencing);

    const IdentityReport s = check_form_equivalence(sample(saddle_function().value, g), ScalarField2(g, 0.0));
    EXPECT_TRUE(s.pass);
    EXPECT_LT(s.max_residual, 1e-12);
    EXPECT_LT(s.detail("r1_max"), 1e-12);
}

TEST(FormEquivalence, ManufacturedPairConvergesAtSecondOrder) {
    const AnalyticFunction u = perturbed_family(0.05);
    double res[3];
    int level = 0;
    for (int n : {65, 129, 257}) {
        const Grid2 g(4.0, n);
        const ManufacturedProblem p = manufacture(u, g);
        const IdentityReport r = check_form_equivalence(p.u_exact, p.phase);
        EXPECT_TRUE(r.pass);
        EXPECT_LE(r.max_residual, 10.0 * g.spacing() * g.spacing()) << "n=" << n;
        res[level++] = r.max_residual;
    }
    EXPECT_GE(std::log2(res[0] / res[1]), 1.8);
    EXPECT_GE(std::log2(res[1] / res[2]), 1.8);
}

TEST(FormEquivalence, MismatchedPhaseFailsWithReportedR1) {
    const Grid2 g(4.0, 33);
    const IdentityReport r = check_form_equivalence(sample(quadratic_family(1.0).value, g), ScalarField2(g, 1.0));
    // with psi = 1 the product form is cos(1) 2 + 0 != 0, but R1 = pi/2 - 1 makes the bound hold
    EXPECT_NEAR(r.detail("r1_max"), kPi / 2 - 1.0, 1e-12);
    EXPECT_NEAR(r.max_residual, 2.0 * std::cos(1.0), 1e-12);
    EXPECT_TRUE(r.pass);
    EXPECT_THROW(check_form_equivalence(ScalarField2(g), ScalarField2(Grid2(4.0, 35))), PreconditionError);
}

TEST(FormEquivalence, InvariantUnderAffineShift) {
    const Grid2 g(4.0, 65);
    const ManufacturedProblem p = manufacture(perturbed_family(0.1), g);
    const IdentityReport a = check_form_equivalence(p.u_exact, p.phase);
    const ScalarField2 shifted = sample(add_affine(perturbed_family(0.1), 3.0, -2.0, 0.5).value, g);
    const IdentityReport b = check_form_equivalence(shifted, p.phase);
    EXPECT_NEAR(a.max_residual, b.max_residual, 1e-9);
    EXPECT_NEAR(a.detail("r1_max"), b.detail("r1_max"), 1e-9);
}

TEST(ComplexFactorization, Examples) {
    const Grid2 g(2.0, 17);
    for (const auto& u : {quadratic_family(1.0), saddle_function(), quadratic_family(2.0), perturbed_family(0.3)}) {
        const IdentityReport r = check_complex_factorization(bundle_of(u, g));
        EXPECT_TRUE(r.pass) << u.name;
        EXPECT_LE(r.max_residual, 1e-12 * (1.0 + r.detail("v_max")));
        EXPECT_EQ(r.tolerance_class, ToleranceClass::Algebraic);
    }
    // |x|^2: (1 - sigma2, sigma1) = (-3, 4) = 5 (cos psi, sin psi)
    const GeometryBundle B = bundle_of(quadratic_family(2.0), g);
    EXPECT_NEAR(1.0 - B.sigma2(5, 5), -3.0, 1e-12);
    EXPECT_NEAR(B.sigma1(5, 5), 4.0, 1e-12);
    EXPECT_NEAR(std::cos(B.phase(5, 5)), -0.6, 1e-12);
}

TEST(VolumeFormula, Examples) {
    const Grid2 g(2.0, 17);
    const IdentityReport q = check_volume_formula(bundle_of(quadratic_family(1.0), g), 0.3);
    EXPECT_TRUE(q.pass);
    EXPECT_EQ(q.detail("nodes_used"), 289.0);
    const IdentityReport s = check_volume_formula(bundle_of(quadratic_family(2.0), g), 0.3);
    EXPECT_TRUE(s.pass);
    EXPECT_LT(s.max_residual, 1e-12);
    EXPECT_THROW(check_volume_formula(bundle_of(saddle_function(), g), 0.3), PreconditionError);
}

TEST(CutoffVolume, StrictForUnitQuadratic) {
    const Grid2 g(4.0, 65);
    const GeometryBundle B = bundle_of(quadratic_family(1.0), g);
    const IdentityReport r = check_cutoff_volume_identity(B, make_cutoff(2.0, 3.0, g));
    EXPECT_TRUE(r.pass);
    // LHS |Dphi|^2 vs RHS 2|Dphi|^2 gives a trace-form gap of zero and max excess 0
    EXPECT_LE(r.max_residual, 0.0);
    EXPECT_LT(r.detail("trace_identity_gap"), 1e-12);
}

TEST(CutoffVolume, ConstantCutoffGivesZeroBothSides) {
    const Grid2 g(4.0, 33);
    CutoffProfile flat = make_cutoff(3.0, 3.5, g);
    flat.phi = ScalarField2(g, 1.0);
    flat.dphi = {ScalarField2(g), ScalarField2(g)};
    const IdentityReport r = check_cutoff_volume_identity(bundle_of(perturbed_family(0.2), g), flat);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_residual, 0.0);
}

TEST(CutoffVolume, ManufacturedSolutionAndPhaseOverride) {
    const Grid2 g(4.0, 129);
    const ManufacturedProblem p = manufacture(perturbed_family(0.1), g);
    const GeometryBundle B = bundle(p.u_exact);
    const IdentityReport r = check_cutoff_volume_identity(B, make_cutoff(2.0, 3.0, g), p.phase);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_residual, 10.0 * g.spacing() * g.spacing());
    // a phase the bundle does not solve is rejected
    EXPECT_THROW(check_cutoff_volume_identity(B, make_cutoff(2.0, 3.0, g), ScalarField2(g, 1.0)), PreconditionError);
}

TEST(SlopeVolume, Examples) {
    const Grid2 g(2.0, 17);
    for (double a : {0.0, 1.0, 10.0}) {
        const GeometryBundle B = bundle_of(quadratic_family(a), g);
        const IdentityReport r = check_slope_volume(B);
        EXPECT_TRUE(r.pass) << a;
    }
    const GeometryBundle B = bundle_of(quadratic_family(10.0), g);
    EXPECT_NEAR(B.slope(3, 3), std::log(std::sqrt(101.0)), 1e-12);
    EXPECT_NEAR(B.slope(3, 3), 2.307, 1e-3);
    EXPECT_NEAR(B.volume(3, 3), 101.0, 1e-9);
}

TEST(CoordinateLaplacian, MatchesMeanCurvatureTangentialPart) {
    double res[2];
    int level = 0;
    for (int n : {65, 129}) {
        const Grid2 g(4.0, n);
        const ManufacturedProblem p = manufacture(perturbed_family(0.1), g);
        const IdentityReport r = check_coordinate_laplacian(bundle(p.u_exact), p.phase, 3.0);
        EXPECT_TRUE(r.pass);
        res[level++] = r.max_residual;
    }
    EXPECT_GT(res[0] / res[1], 3.0);
}

TEST(CoordinateLaplacian, ZeroForConstantPhase) {
    const Grid2 g(4.0, 33);
    const ManufacturedProblem p = manufacture(anisotropic_family(1.0, 0.3), g);
    const IdentityReport r = check_coordinate_laplacian(bundle(p.u_exact), p.phase, 3.0);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.max_residual, 1e-10);
}

TEST(AlgebraicIdentities, ExactlyZeroOnQuadraticsAtEveryResolution) {
    for (int n : {17, 33, 65}) {
        const Grid2 g(4.0, n);
        const GeometryBundle B = bundle_of(anisotropic_family(1.2, 0.9), g);
        EXPECT_LT(check_complex_factorization(B).max_residual, 1e-14);
        EXPECT_LT(check_volume_formula(B, 0.3).max_residual, 1e-13);
        EXPECT_TRUE(check_slope_volume(B).pass);
    }
}
