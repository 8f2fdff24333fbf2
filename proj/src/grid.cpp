#include "lmce/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lmce/error.hpp"

namespace lmce {

namespace {

// Relative fuzz so that nodes lying exactly on a circle are counted inside.
constexpr double kDiskFuzz = 1e-12;

void require_radius(const Grid2& grid, double r, const char* op) {
    if (!(r >= 0.0) || r > grid.half_width() * (1.0 + kDiskFuzz)) {
        throw PreconditionError(std::string(op) + ": radius " + std::to_string(r) +
                                " exceeds grid half-width " + std::to_string(grid.half_width()));
    }
}

// First derivative along one grid line of length n with stride `stride`.
template <class Get>
double d1(Get get, int k, int n, double h) {
    if (k == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h);
    if (k == n - 1) return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h);
    return (get(k + 1) - get(k - 1)) / (2.0 * h);
}

template <class Get>
double d2(Get get, int k, int n, double h) {
    const double h2 = h * h;
    if (k == 0) return (2.0 * get(0) - 5.0 * get(1) + 4.0 * get(2) - get(3)) / h2;
    if (k == n - 1) return (2.0 * get(n - 1) - 5.0 * get(n - 2) + 4.0 * get(n - 3) - get(n - 4)) / h2;
    return (get(k + 1) - 2.0 * get(k) + get(k - 1)) / h2;
}

ScalarField2 diff_x1(const ScalarField2& f) {
    const Grid2& g = f.grid();
    const int n = g.nodes_per_axis();
    ScalarField2 out(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out(i, j) = d1([&](int k) { return f(k, j); }, i, n, g.spacing());
    return out;
}

ScalarField2 diff_x2(const ScalarField2& f) {
    const Grid2& g = f.grid();
    const int n = g.nodes_per_axis();
    ScalarField2 out(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out(i, j) = d1([&](int k) { return f(i, k); }, j, n, g.spacing());
    return out;
}

// Quintic smoothstep s(t) = 6t^5 - 15t^4 + 10t^3 and its slope.
double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_slope(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

}  // namespace

Grid2::Grid2(double half_width, int nodes_per_axis)
    : half_width_(half_width), n_(nodes_per_axis) {
    if (nodes_per_axis < 5) {
        throw std::invalid_argument("Grid2: need at least 5 nodes per axis, got " +
                                    std::to_string(nodes_per_axis));
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw std::invalid_argument("Grid2: half-width must be positive and finite");
    }
    spacing_ = 2.0 * half_width / (nodes_per_axis - 1);
    half_step_ = half_width / (nodes_per_axis - 1);
}

bool Grid2::in_disk(int i, int j, double r) const {
    const double x = coord(i), y = coord(j);
    return x * x + y * y <= r * r * (1.0 + kDiskFuzz);
}

Grid2 build_grid(double half_width, int nodes_per_axis) { return Grid2(half_width, nodes_per_axis); }

ScalarField2::ScalarField2(const Grid2& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField2::ScalarField2(const Grid2& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("ScalarField2: expected " + std::to_string(grid_.size()) +
                                    " values, got " + std::to_string(values_.size()));
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("ScalarField2: non-finite value");
    }
}

double ScalarField2::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField2::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField2::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField2 sample(const PlaneFunction& f, const Grid2& grid) {
    const int n = grid.nodes_per_axis();
    ScalarField2 out(grid);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = f(grid.coord(i), grid.coord(j));
            if (!std::isfinite(v)) {
                throw std::invalid_argument("sample: non-finite value at (" + std::to_string(grid.coord(i)) +
                                            ", " + std::to_string(grid.coord(j)) + ")");
            }
            out(i, j) = v;
        }
    }
    return out;
}

ScalarField2 map(const ScalarField2& f, const std::function<double(double)>& op) {
    ScalarField2 out(f.grid());
    auto src = f.values();
    auto dst = out.values();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = op(src[k]);
    return out;
}

ScalarField2 zip(const ScalarField2& a, const ScalarField2& b, const std::function<double(double, double)>& op) {
    if (!(a.grid() == b.grid())) throw PreconditionError("zip: fields live on different grids");
    ScalarField2 out(a.grid());
    auto sa = a.values();
    auto sb = b.values();
    auto dst = out.values();
    for (std::size_t k = 0; k < sa.size(); ++k) dst[k] = op(sa[k], sb[k]);
    return out;
}

Vec2Field gradient_fd(const ScalarField2& f) { return {diff_x1(f), diff_x2(f)}; }

SymMat2Field hessian_fd(const ScalarField2& f) {
    const Grid2& g = f.grid();
    const int n = g.nodes_per_axis();
    const double h = g.spacing();
    ScalarField2 m11(g), m22(g);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            m11(i, j) = d2([&](int k) { return f(k, j); }, i, n, h);
            m22(i, j) = d2([&](int k) { return f(i, k); }, j, n, h);
        }
    }
    return {std::move(m11), diff_x2(diff_x1(f)), std::move(m22)};
}

double integrate_disk(const ScalarField2& f, double r) {
    const Grid2& g = f.grid();
    require_radius(g, r, "integrate_disk");
    const int n = g.nodes_per_axis();
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (g.in_disk(i, j, r)) sum += f(i, j);
    return sum * g.spacing() * g.spacing();
}

double sup_norm_disk(const ScalarField2& f, double r) {
    const Grid2& g = f.grid();
    require_radius(g, r, "sup_norm_disk");
    const int n = g.nodes_per_axis();
    double m = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (g.in_disk(i, j, r)) m = std::max(m, std::abs(f(i, j)));
    return m;
}

double CutoffProfile::value_at(double radius) const {
    if (radius <= inner_radius) return 1.0;
    if (radius >= outer_radius) return 0.0;
    return 1.0 - smoothstep((radius - inner_radius) / (outer_radius - inner_radius));
}

double CutoffProfile::radial_derivative(double radius) const {
    if (radius <= inner_radius || radius >= outer_radius) return 0.0;
    const double w = outer_radius - inner_radius;
    return -smoothstep_slope((radius - inner_radius) / w) / w;
}

double CutoffProfile::dphi_l2_squared() const {
    // 2*pi * int phi'(r)^2 r dr with int s'^2 = 10/7 and int t s'^2 = 5/7 on [0, 1].
    const double w = outer_radius - inner_radius;
    return 2.0 * std::numbers::pi / w * (10.0 * inner_radius / 7.0 + 5.0 * w / 7.0);
}

CutoffProfile make_cutoff(double inner_radius, double outer_radius, const Grid2& grid) {
    if (!(inner_radius > 0.0) || !(outer_radius > inner_radius)) {
        throw PreconditionError("make_cutoff: need 0 < r1 < r2");
    }
    require_radius(grid, outer_radius, "make_cutoff");

    CutoffProfile c{inner_radius, outer_radius, ScalarField2(grid), {ScalarField2(grid), ScalarField2(grid)},
                    15.0 / 8.0 / (outer_radius - inner_radius)};
    const int n = grid.nodes_per_axis();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x = grid.coord(i), y = grid.coord(j);
            const double r = std::hypot(x, y);
            c.phi(i, j) = c.value_at(r);
            const double dr = c.radial_derivative(r);
            if (dr != 0.0) {
                c.dphi.x1(i, j) = dr * x / r;
                c.dphi.x2(i, j) = dr * y / r;
            }
        }
    }
    return c;
}

}  // namespace lmce
