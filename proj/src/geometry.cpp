#include "lmce/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lmce/error.hpp"

namespace lmce {

namespace {

void require_same_grid(const Grid2& a, const Grid2& b, const char* op) {
    if (!(a == b)) throw PreconditionError(std::string(op) + ": field and bundle live on different grids");
}

}  // namespace

std::pair<double, double> eigen_sym2(double m11, double m12, double m22) {
    if (!std::isfinite(m11) || !std::isfinite(m12) || !std::isfinite(m22)) {
        throw std::invalid_argument("eigen_sym2: non-finite entry");
    }
    const double tr = m11 + m22;
    // tr^2 - 4 det written without cancellation
    const double diff = m11 - m22;
    const double disc = std::max(0.0, diff * diff + 4.0 * m12 * m12);
    const double s = std::sqrt(disc);
    return {0.5 * (tr + s), 0.5 * (tr - s)};
}

void SlopeConstants::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("SlopeConstants: delta must be positive");
    if (!(A >= 0.0)) throw std::invalid_argument("SlopeConstants: A must be non-negative");
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("SlopeConstants: c must lie in (0, 1]");
    if (!(gap_rel > 0.0)) throw std::invalid_argument("SlopeConstants: eigengap tolerance must be positive");
}

bool SlopeConstants::coalesced(double lambda1, double lambda2) const {
    return lambda1 - lambda2 < gap_rel * (1.0 + std::abs(lambda1));
}

GeometryBundle bundle(const ScalarField2& u) { return bundle_from_hessian(hessian_fd(u)); }

GeometryBundle bundle_from_hessian(const SymMat2Field& hessian) {
    const Grid2& grid = hessian.m11.grid();
    const auto blank = [&] { return ScalarField2(grid); };
    GeometryBundle B{hessian,  blank(), blank(), blank(), blank(), blank(),
                     blank(),  {blank(), blank(), blank()}, {blank(), blank(), blank()},
                     blank(),  blank()};

    const std::size_t count = grid.size();
    auto a = hessian.m11.values();
    auto c = hessian.m12.values();
    auto d = hessian.m22.values();
    for (std::size_t k = 0; k < count; ++k) {
        const auto [l1, l2] = eigen_sym2(a[k], c[k], d[k]);
        B.lambda1.values()[k] = l1;
        B.lambda2.values()[k] = l2;
        B.phase.values()[k] = std::atan(l1) + std::atan(l2);
        B.sigma1.values()[k] = l1 + l2;
        B.sigma2.values()[k] = l1 * l2;
        const double vol = std::sqrt((1.0 + l1 * l1) * (1.0 + l2 * l2));
        B.volume.values()[k] = vol;
        B.slope.values()[k] = 0.5 * std::log1p(l1 * l1);

        // g = I + S^2 for S = [[a, c], [c, d]]
        const double g11 = 1.0 + a[k] * a[k] + c[k] * c[k];
        const double g12 = c[k] * (a[k] + d[k]);
        const double g22 = 1.0 + d[k] * d[k] + c[k] * c[k];
        B.metric.m11.values()[k] = g11;
        B.metric.m12.values()[k] = g12;
        B.metric.m22.values()[k] = g22;
        B.sqrt_det_g.values()[k] = std::sqrt(g11 * g22 - g12 * g12);
        const double det = vol * vol;
        B.inverse_metric.m11.values()[k] = g22 / det;
        B.inverse_metric.m12.values()[k] = -g12 / det;
        B.inverse_metric.m22.values()[k] = g11 / det;
    }
    return B;
}

ScalarField2 grad_g_norm2(const ScalarField2& f, const GeometryBundle& B) {
    require_same_grid(f.grid(), B.grid(), "grad_g_norm2");
    const Vec2Field df = gradient_fd(f);
    ScalarField2 out(f.grid());
    for (std::size_t k = 0; k < out.values().size(); ++k) {
        const double f1 = df.x1.values()[k], f2 = df.x2.values()[k];
        out.values()[k] = B.inverse_metric.m11.values()[k] * f1 * f1 +
                          2.0 * B.inverse_metric.m12.values()[k] * f1 * f2 +
                          B.inverse_metric.m22.values()[k] * f2 * f2;
    }
    return out;
}

ScalarField2 laplace_beltrami(const ScalarField2& f, const GeometryBundle& B) {
    require_same_grid(f.grid(), B.grid(), "laplace_beltrami");
    const Grid2& grid = f.grid();
    const int n = grid.nodes_per_axis();
    const double h = grid.spacing();

    const ScalarField2 a11 = zip(B.volume, B.inverse_metric.m11, std::multiplies<>{});
    const ScalarField2 a12 = zip(B.volume, B.inverse_metric.m12, std::multiplies<>{});
    const ScalarField2 a22 = zip(B.volume, B.inverse_metric.m22, std::multiplies<>{});
    const Vec2Field df = gradient_fd(f);

    ScalarField2 out(grid);
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const double east = 0.5 * (a11(i + 1, j) + a11(i, j)) * (f(i + 1, j) - f(i, j));
            const double west = 0.5 * (a11(i - 1, j) + a11(i, j)) * (f(i, j) - f(i - 1, j));
            const double north = 0.5 * (a22(i, j + 1) + a22(i, j)) * (f(i, j + 1) - f(i, j));
            const double south = 0.5 * (a22(i, j - 1) + a22(i, j)) * (f(i, j) - f(i, j - 1));
            const double mixed1 = (a12(i + 1, j) * df.x2(i + 1, j) - a12(i - 1, j) * df.x2(i - 1, j)) / (2.0 * h);
            const double mixed2 = (a12(i, j + 1) * df.x1(i, j + 1) - a12(i, j - 1) * df.x1(i, j - 1)) / (2.0 * h);
            out(i, j) = ((east - west + north - south) / (h * h) + mixed1 + mixed2) / B.volume(i, j);
        }
    }

    // outer ring: one-sided differences of the node fluxes
    ScalarField2 flux1(grid), flux2(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double f1 = df.x1.values()[k], f2 = df.x2.values()[k];
        flux1.values()[k] = a11.values()[k] * f1 + a12.values()[k] * f2;
        flux2.values()[k] = a12.values()[k] * f1 + a22.values()[k] * f2;
    }
    const Vec2Field d1 = gradient_fd(flux1);
    const Vec2Field d2 = gradient_fd(flux2);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (!grid.is_boundary(i, j)) continue;
            out(i, j) = (d1.x1(i, j) + d2.x2(i, j)) / B.volume(i, j);
        }
    }
    return out;
}

ScalarField2 laplace_beltrami_nondivergence(const ScalarField2& f, const GeometryBundle& B) {
    require_same_grid(f.grid(), B.grid(), "laplace_beltrami_nondivergence");
    const Grid2& grid = f.grid();
    const Vec2Field df = gradient_fd(f);
    const SymMat2Field d2f = hessian_fd(f);
    const Vec2Field da11 = gradient_fd(zip(B.volume, B.inverse_metric.m11, std::multiplies<>{}));
    const Vec2Field da12 = gradient_fd(zip(B.volume, B.inverse_metric.m12, std::multiplies<>{}));
    const Vec2Field da22 = gradient_fd(zip(B.volume, B.inverse_metric.m22, std::multiplies<>{}));

    ScalarField2 out(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& gi = B.inverse_metric;
        const double second = gi.m11.values()[k] * d2f.m11.values()[k] +
                              2.0 * gi.m12.values()[k] * d2f.m12.values()[k] +
                              gi.m22.values()[k] * d2f.m22.values()[k];
        // (1/V) d_i(V g^{ij}) for j = 1, 2
        const double drift1 = da11.x1.values()[k] + da12.x2.values()[k];
        const double drift2 = da12.x1.values()[k] + da22.x2.values()[k];
        out.values()[k] = second + (drift1 * df.x1.values()[k] + drift2 * df.x2.values()[k]) / B.volume.values()[k];
    }
    return out;
}

MeanCurvature mean_curvature(const GeometryBundle& B, const ScalarField2& psi) {
    require_same_grid(psi.grid(), B.grid(), "mean_curvature");
    const Grid2& grid = psi.grid();
    const Vec2Field dpsi = gradient_fd(psi);
    MeanCurvature H{{ScalarField2(grid), ScalarField2(grid), ScalarField2(grid), ScalarField2(grid)},
                    ScalarField2(grid)};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& gi = B.inverse_metric;
        const double p1 = dpsi.x1.values()[k], p2 = dpsi.x2.values()[k];
        const double v1 = gi.m11.values()[k] * p1 + gi.m12.values()[k] * p2;
        const double v2 = gi.m12.values()[k] * p1 + gi.m22.values()[k] * p2;
        const double sv1 = B.hessian.m11.values()[k] * v1 + B.hessian.m12.values()[k] * v2;
        const double sv2 = B.hessian.m12.values()[k] * v1 + B.hessian.m22.values()[k] * v2;
        H.vector[0].values()[k] = -sv1;
        H.vector[1].values()[k] = -sv2;
        H.vector[2].values()[k] = v1;
        H.vector[3].values()[k] = v2;
        H.norm.values()[k] = std::sqrt(std::max(0.0, p1 * v1 + p2 * v2));
    }
    return H;
}

ScalarField2 slope(const GeometryBundle& B) { return B.slope; }

ScalarField2 modified_slope(const GeometryBundle& B, const SlopeConstants& K) {
    const Grid2& grid = B.grid();
    ScalarField2 out = B.slope;
    const int n = grid.nodes_per_axis();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x = grid.coord(i), y = grid.coord(j);
            out(i, j) += 0.5 * K.A * (x * x + y * y);
        }
    }
    return out;
}

}  // namespace lmce
