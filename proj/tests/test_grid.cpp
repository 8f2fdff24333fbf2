#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "lmce/error.hpp"
#include "lmce/grid.hpp"

using namespace lmce;

namespace {

constexpr double kPi = std::numbers::pi;

double max_error(const ScalarField2& f, const PlaneFunction& exact) {
    const Grid2& g = f.grid();
    double e = 0.0;
    for (int j = 0; j < g.nodes_per_axis(); ++j)
        for (int i = 0; i < g.nodes_per_axis(); ++i)
            e = std::max(e, std::abs(f(i, j) - exact(g.coord(i), g.coord(j))));
    return e;
}

}  // namespace

TEST(Grid, SpacingAndSize) {
    const Grid2 small = build_grid(2.0, 5);
    EXPECT_DOUBLE_EQ(small.spacing(), 1.0);
    EXPECT_EQ(small.size(), 25u);
    EXPECT_DOUBLE_EQ(small.coord(0), -2.0);
    EXPECT_DOUBLE_EQ(small.coord(4), 2.0);

    const Grid2 fine = build_grid(4.0, 257);
    EXPECT_DOUBLE_EQ(fine.spacing(), 1.0 / 32.0);
}

TEST(Grid, RejectsBadShape) {
    EXPECT_THROW(build_grid(2.0, 3), std::invalid_argument);
    EXPECT_THROW(build_grid(0.0, 9), std::invalid_argument);
    EXPECT_THROW(build_grid(-1.0, 9), std::invalid_argument);
    EXPECT_THROW(build_grid(std::numeric_limits<double>::infinity(), 9), std::invalid_argument);
}

TEST(Grid, CoordinatesSymmetricAboutOrigin) {
    for (int n : {5, 6, 64, 257}) {
        const Grid2 g(3.7, n);
        for (int i = 0; i < n; ++i) EXPECT_EQ(g.coord(i), -g.coord(n - 1 - i)) << "n=" << n << " i=" << i;
        // node i sits at -L + i h up to round-off
        for (int i = 0; i < n; ++i) EXPECT_NEAR(g.coord(i), -3.7 + i * g.spacing(), 1e-14);
    }
    EXPECT_EQ(Grid2(4.0, 257).coord(128), 0.0);
}

TEST(Field, RejectsNonFiniteAndWrongSize) {
    const Grid2 g(1.0, 5);
    EXPECT_THROW(ScalarField2(g, std::vector<double>(24, 0.0)), std::invalid_argument);
    std::vector<double> v(25, 0.0);
    v[7] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(ScalarField2(g, v), std::invalid_argument);
    EXPECT_THROW(sample([](double x, double) { return 1.0 / x; }, g), std::invalid_argument);
}

TEST(Sample, ExactNodeValues) {
    const Grid2 g(1.0, 5);
    const ScalarField2 zero = sample([](double, double) { return 0.0; }, g);
    EXPECT_EQ(zero.max_abs(), 0.0);

    const ScalarField2 x1 = sample([](double x, double) { return x; }, g);
    const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) EXPECT_EQ(x1(i, j), expected[i]);

    const ScalarField2 q = sample([](double x, double y) { return 0.5 * (x * x + y * y); }, Grid2(4.0, 257));
    EXPECT_EQ(q(128, 128), 0.0);
}

TEST(Derivatives, ExactOnQuadratics) {
    const auto q = [](double x, double y) { return 0.3 * x * x - 0.7 * x * y + 1.1 * y * y + 2.0 * x - y + 5.0; };
    for (int n : {5, 8, 33}) {
        const Grid2 g(2.5, n);
        const ScalarField2 f = sample(q, g);
        const Vec2Field d = gradient_fd(f);
        const SymMat2Field H = hessian_fd(f);
        EXPECT_LT(max_error(d.x1, [](double x, double y) { return 0.6 * x - 0.7 * y + 2.0; }), 1e-11);
        EXPECT_LT(max_error(d.x2, [](double x, double y) { return -0.7 * x + 2.2 * y - 1.0; }), 1e-11);
        EXPECT_LT(max_error(H.m11, [](double, double) { return 0.6; }), 1e-10);
        EXPECT_LT(max_error(H.m12, [](double, double) { return -0.7; }), 1e-10);
        EXPECT_LT(max_error(H.m22, [](double, double) { return 2.2; }), 1e-10);
    }
}

TEST(Derivatives, SaddleHessian) {
    const Grid2 g(2.0, 17);
    const SymMat2Field H = hessian_fd(sample([](double x, double y) { return x * y; }, g));
    EXPECT_LT(H.m11.max_abs(), 1e-12);
    EXPECT_LT(max_error(H.m12, [](double, double) { return 1.0; }), 1e-12);
    EXPECT_LT(H.m22.max_abs(), 1e-12);
}

TEST(Derivatives, SecondOrderRefinement) {
    const auto f = [](double x, double y) { return std::sin(x) * std::sin(y); };
    double eh[4] = {}, eg[2] = {};
    int level = 0;
    for (int n : {65, 129}) {
        const Grid2 g(2.0, n);
        const ScalarField2 s = sample(f, g);
        const SymMat2Field H = hessian_fd(s);
        const Vec2Field d = gradient_fd(s);
        eh[level] = std::max({max_error(H.m11, [](double x, double y) { return -std::sin(x) * std::sin(y); }),
                              max_error(H.m12, [](double x, double y) { return std::cos(x) * std::cos(y); }),
                              max_error(H.m22, [](double x, double y) { return -std::sin(x) * std::sin(y); })});
        eg[level] = std::max(max_error(d.x1, [](double x, double y) { return std::cos(x) * std::sin(y); }),
                             max_error(d.x2, [](double x, double y) { return std::sin(x) * std::cos(y); }));
        ++level;
    }
    EXPECT_NEAR(eh[0] / eh[1], 4.0, 0.4);
    const double order = std::log2(eg[0] / eg[1]);
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
}

TEST(Quadrature, DiskArea) {
    const Grid2 g(4.0, 257);
    const ScalarField2 one(g, 1.0);
    for (double r : {1.0, 2.0, 3.0}) EXPECT_NEAR(integrate_disk(one, r), kPi * r * r, 10.0 * g.spacing()) << r;
}

TEST(Quadrature, OddAndRadialIntegrands) {
    const Grid2 g(4.0, 257);
    const double h = g.spacing();
    const ScalarField2 x1 = sample([](double x, double) { return x; }, g);
    for (double r : {0.7, 2.0, 3.3}) EXPECT_NEAR(integrate_disk(x1, r), 0.0, 1e-12);
    // O(h) boundary layer: perimeter times sup f
    const ScalarField2 r2 = sample([](double x, double y) { return x * x + y * y; }, g);
    EXPECT_NEAR(integrate_disk(r2, 2.0), 8.0 * kPi, 4.0 * kPi * 4.0 * h);
}

TEST(Quadrature, RadiusBeyondGridRejected) {
    const Grid2 g(2.0, 9);
    const ScalarField2 one(g, 1.0);
    EXPECT_THROW(integrate_disk(one, 2.5), PreconditionError);
    EXPECT_THROW(sup_norm_disk(one, 2.5), PreconditionError);
}

TEST(SupNorm, Examples) {
    const Grid2 g(4.0, 257);
    EXPECT_DOUBLE_EQ(sup_norm_disk(sample([](double x, double) { return x; }, g), 1.0), 1.0);
    EXPECT_DOUBLE_EQ(sup_norm_disk(ScalarField2(g, -2.5), 3.0), 2.5);
    EXPECT_DOUBLE_EQ(sup_norm_disk(sample([](double x, double y) { return x * x + y * y; }, g), 2.0), 4.0);
}

TEST(Cutoff, ProfileInvariants) {
    const Grid2 g(4.0, 129);
    const CutoffProfile c = make_cutoff(2.0, 3.0, g);
    EXPECT_EQ(c.value_at(0.0), 1.0);
    EXPECT_EQ(c.value_at(2.0), 1.0);
    EXPECT_EQ(c.value_at(3.0), 0.0);
    EXPECT_LT(c.gradient_bound, 2.0);
    EXPECT_DOUBLE_EQ(c.gradient_bound, 1.875);
    for (int j = 0; j < 129; ++j) {
        for (int i = 0; i < 129; ++i) {
            const double r = std::hypot(g.coord(i), g.coord(j));
            ASSERT_GE(c.phi(i, j), 0.0);
            ASSERT_LE(c.phi(i, j), 1.0);
            if (r <= 2.0) {
                ASSERT_EQ(c.phi(i, j), 1.0);
            }
            if (r >= 3.0) {
                ASSERT_EQ(c.phi(i, j), 0.0);
            }
            ASSERT_LE(std::hypot(c.dphi.x1(i, j), c.dphi.x2(i, j)), c.gradient_bound + 1e-12);
        }
    }
    EXPECT_EQ(c.phi(64, 64), 1.0);
}

TEST(Cutoff, AnalyticGradientMatchesDifferences) {
    const Grid2 g(4.0, 257);
    const CutoffProfile c = make_cutoff(2.0, 3.0, g);
    const Vec2Field d = gradient_fd(c.phi);
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        e = std::max(e, std::abs(d.x1.values()[k] - c.dphi.x1.values()[k]));
        e = std::max(e, std::abs(d.x2.values()[k] - c.dphi.x2.values()[k]));
    }
    EXPECT_LT(e, 50.0 * g.spacing() * g.spacing());
}

TEST(Cutoff, GradientEnergyMatchesRadialQuadrature) {
    const CutoffProfile c = make_cutoff(2.0, 3.0, Grid2(4.0, 9));
    // 2 pi int r phi'(r)^2 dr by the midpoint rule with phi' from central differences of value_at
    const int samples = 1000000;
    const double a = 2.0, b = 3.0, dr = (b - a) / samples, eps = 1e-6;
    double sum = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double r = a + (k + 0.5) * dr;
        const double slope = (c.value_at(r + eps) - c.value_at(r - eps)) / (2.0 * eps);
        sum += r * slope * slope;
    }
    const double oracle = 2.0 * kPi * sum * dr;
    EXPECT_NEAR(c.dphi_l2_squared(), oracle, 1e-6);
    EXPECT_NEAR(c.dphi_l2_squared(), 50.0 * kPi / 7.0, 1e-12);
}

TEST(Cutoff, RejectsBadRadii) {
    const Grid2 g(4.0, 33);
    EXPECT_THROW(make_cutoff(3.0, 2.0, g), PreconditionError);
    EXPECT_THROW(make_cutoff(0.0, 2.0, g), PreconditionError);
    EXPECT_THROW(make_cutoff(2.0, 5.0, g), PreconditionError);
}
