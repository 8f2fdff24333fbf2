#include "lmce/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lmce/error.hpp"

namespace lmce {

namespace {

// Tracks the largest residual and where it occurred.
struct Worst {
    double value = 0.0;
    int i = -1;
    int j = -1;

    void offer(double v, int ii, int jj) {
        if (i < 0 || v > value) {
            value = v;
            i = ii;
            j = jj;
        }
    }
};

IdentityReport finish(std::string name, const Grid2& grid, const Worst& w, double tol, ToleranceClass cls) {
    IdentityReport r;
    r.name = std::move(name);
    r.max_residual = w.value;
    r.at_i = w.i;
    r.at_j = w.j;
    if (w.i >= 0) {
        r.at_x1 = grid.coord(w.i);
        r.at_x2 = grid.coord(w.j);
    }
    r.tolerance = tol;
    r.tolerance_class = cls;
    r.pass = w.value <= tol;
    return r;
}

}  // namespace

const char* to_string(ToleranceClass c) {
    return c == ToleranceClass::Algebraic ? "algebraic" : "differencing";
}

double IdentityReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    throw std::out_of_range("IdentityReport: no detail named " + key);
}

IdentityReport check_form_equivalence(const ScalarField2& u, const ScalarField2& psi, double C) {
    if (!(u.grid() == psi.grid())) throw PreconditionError("check_form_equivalence: grid mismatch");
    const Grid2& grid = u.grid();
    const SymMat2Field hess = hessian_fd(u);
    const int n = grid.nodes_per_axis();

    Worst r2;
    double r1_max = 0.0;
    double v_max = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double a = hess.m11(i, j), c = hess.m12(i, j), d = hess.m22(i, j);
            const auto [l1, l2] = eigen_sym2(a, c, d);
            const double p = psi(i, j);
            r1_max = std::max(r1_max, std::abs(std::atan(l1) + std::atan(l2) - p));
            v_max = std::max(v_max, std::sqrt((1.0 + l1 * l1) * (1.0 + l2 * l2)));
            const double product = std::cos(p) * (a + d) + std::sin(p) * (a * d - c * c - 1.0);
            r2.offer(std::abs(product), i, j);
        }
    }
    const double h = grid.spacing();
    IdentityReport rep = finish("form_equivalence", grid, r2, (1.0 + v_max) * r1_max + C * h * h,
                                ToleranceClass::Differencing);
    rep.details = {{"r1_max", r1_max}, {"v_max", v_max}};
    return rep;
}

IdentityReport check_complex_factorization(const GeometryBundle& B) {
    const Grid2& grid = B.grid();
    const int n = grid.nodes_per_axis();
    Worst w;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double V = B.volume(i, j), p = B.phase(i, j);
            w.offer(std::hypot(1.0 - B.sigma2(i, j) - V * std::cos(p), B.sigma1(i, j) - V * std::sin(p)), i, j);
        }
    }
    const double v_max = B.volume.max();
    IdentityReport rep = finish("complex_factorization", grid, w, 1e-12 * (1.0 + v_max), ToleranceClass::Algebraic);
    rep.details = {{"v_max", v_max}};
    return rep;
}

IdentityReport check_volume_formula(const GeometryBundle& B, double delta) {
    const Grid2& grid = B.grid();
    const int n = grid.nodes_per_axis();
    const double floor_sin = std::sin(delta);
    Worst w;
    int used = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double p = B.phase(i, j);
            if (!(p > 0.0 && p < std::numbers::pi)) {
                throw PreconditionError("check_volume_formula: phase " + std::to_string(p) + " outside (0, pi) at (" +
                                        std::to_string(grid.coord(i)) + ", " + std::to_string(grid.coord(j)) + ")");
            }
            const double s = std::sin(p);
            if (s < floor_sin) continue;
            ++used;
            w.offer(std::abs(B.volume(i, j) - B.sigma1(i, j) / s), i, j);
        }
    }
    const double v_max = B.volume.max();
    IdentityReport rep = finish("volume_formula", grid, w, 1e-10 * v_max, ToleranceClass::Algebraic);
    rep.details = {{"nodes_used", static_cast<double>(used)}, {"v_max", v_max}};
    return rep;
}

IdentityReport check_cutoff_volume_identity(const GeometryBundle& B, const CutoffProfile& phi,
                                            const std::optional<ScalarField2>& psi, double C,
                                            double phase_tolerance) {
    const Grid2& grid = B.grid();
    if (!(phi.phi.grid() == grid)) throw PreconditionError("check_cutoff_volume_identity: grid mismatch");
    if (psi) {
        if (!(psi->grid() == grid)) throw PreconditionError("check_cutoff_volume_identity: grid mismatch");
        double gap = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            gap = std::max(gap, std::abs(psi->values()[k] - B.phase.values()[k]));
        if (gap > phase_tolerance) {
            throw PreconditionError("check_cutoff_volume_identity: bundle is not a solution for the given phase "
                                    "(max phase gap " + std::to_string(gap) + ")");
        }
    }
    const ScalarField2& phase = psi ? *psi : B.phase;
    const int n = grid.nodes_per_axis();
    Worst excess;
    double identity_gap = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double p1 = phi.dphi.x1(i, j), p2 = phi.dphi.x2(i, j);
            const double dphi2 = p1 * p1 + p2 * p2;
            const auto& gi = B.inverse_metric;
            const double V = B.volume(i, j);
            const double lhs = (gi.m11(i, j) * p1 * p1 + 2.0 * gi.m12(i, j) * p1 * p2 + gi.m22(i, j) * p2 * p2) * V;
            const double ps = phase(i, j);
            const double rhs = dphi2 * (2.0 * std::cos(ps) + B.sigma1(i, j) * std::sin(ps));
            excess.offer(std::max(0.0, lhs - rhs), i, j);
            const double trace_form = dphi2 * (gi.m11(i, j) + gi.m22(i, j)) * V;
            identity_gap = std::max(identity_gap, std::abs(trace_form - rhs));
        }
    }
    const double h = grid.spacing();
    IdentityReport rep =
        finish("cutoff_volume", grid, excess, C * h * h, ToleranceClass::Differencing);
    rep.details = {{"trace_identity_gap", identity_gap}};
    return rep;
}

IdentityReport check_slope_volume(const GeometryBundle& B) {
    const Grid2& grid = B.grid();
    const int n = grid.nodes_per_axis();
    Worst w;
    double tightest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double diff = B.slope(i, j) - B.volume(i, j);
            w.offer(std::max(0.0, diff), i, j);
            tightest = std::min(tightest, -diff);
        }
    }
    IdentityReport rep = finish("slope_volume", grid, w, 0.0, ToleranceClass::Algebraic);
    rep.details = {{"min_margin", tightest}};
    return rep;
}

IdentityReport check_coordinate_laplacian(const GeometryBundle& B, const ScalarField2& psi, double radius, double C) {
    const Grid2& grid = B.grid();
    if (!(psi.grid() == grid)) throw PreconditionError("check_coordinate_laplacian: grid mismatch");
    if (radius > grid.half_width()) throw PreconditionError("check_coordinate_laplacian: radius exceeds grid");
    const ScalarField2 x1 = sample([](double x, double) { return x; }, grid);
    const ScalarField2 x2 = sample([](double, double y) { return y; }, grid);
    const ScalarField2 lap1 = laplace_beltrami(x1, B);
    const ScalarField2 lap2 = laplace_beltrami(x2, B);
    const MeanCurvature H = mean_curvature(B, psi);

    const int n = grid.nodes_per_axis();
    Worst w;
    double scale = 0.0;
    for (int j = 2; j < n - 2; ++j) {
        for (int i = 2; i < n - 2; ++i) {
            if (!grid.in_disk(i, j, radius)) continue;
            // x-part of H is -(S g^-1 D psi)
            w.offer(std::hypot(lap1(i, j) - H.vector[0](i, j), lap2(i, j) - H.vector[1](i, j)), i, j);
            scale = std::max(scale, std::hypot(H.vector[0](i, j), H.vector[1](i, j)));
        }
    }
    const double h = grid.spacing();
    IdentityReport rep = finish("coordinate_laplacian", grid, w, C * h * h, ToleranceClass::Differencing);
    rep.details = {{"max_tangential_h", scale}};
    return rep;
}

}  // namespace lmce
