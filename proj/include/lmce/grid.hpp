#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lmce {

/// Uniform tensor grid on the square [-L, L]^2 with n nodes per axis.
///
/// Node (i, j) sits at (coord(i), coord(j)); i runs along x1, j along x2.
/// Coordinates are computed as (2i - (n-1)) * L / (n-1) so that the node set
/// is exactly symmetric about the origin (and contains it when n is odd).
class Grid2 {
public:
    /// Throws std::invalid_argument for n < 5 or L <= 0.
    Grid2(double half_width, int nodes_per_axis);

    double half_width() const { return half_width_; }
    int nodes_per_axis() const { return n_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }

    double coord(int i) const { return (2.0 * i - (n_ - 1)) * half_step_; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == n_ - 1 || j == n_ - 1; }
    /// True when node (i, j) lies in the closed disk of radius r about the origin.
    bool in_disk(int i, int j, double r) const;

    bool operator==(const Grid2& other) const {
        return half_width_ == other.half_width_ && n_ == other.n_;
    }

private:
    double half_width_;
    int n_;
    double spacing_;
    double half_step_;
};

Grid2 build_grid(double half_width, int nodes_per_axis);

/// Node values of a smooth function on a Grid2. Values are always finite.
class ScalarField2 {
public:
    explicit ScalarField2(const Grid2& grid, double fill = 0.0);
    /// Throws std::invalid_argument on size mismatch or non-finite entries.
    ScalarField2(const Grid2& grid, std::vector<double> values);

    const Grid2& grid() const { return grid_; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double max_abs() const;
    double min() const;
    double max() const;

private:
    Grid2 grid_;
    std::vector<double> values_;
};

struct Vec2Field {
    ScalarField2 x1;
    ScalarField2 x2;
};

/// Symmetric 2x2 matrix field, stored as (m11, m12, m22).
struct SymMat2Field {
    ScalarField2 m11;
    ScalarField2 m12;
    ScalarField2 m22;
};

using PlaneFunction = std::function<double(double, double)>;

/// Exact node-wise evaluation. Throws std::invalid_argument when the function
/// is not finite at some node.
ScalarField2 sample(const PlaneFunction& f, const Grid2& grid);

/// Apply op node-wise to a field (or a pair of fields on the same grid).
ScalarField2 map(const ScalarField2& f, const std::function<double(double)>& op);
ScalarField2 zip(const ScalarField2& a, const ScalarField2& b, const std::function<double(double, double)>& op);

/// Second-order central differences in the interior, second-order one-sided
/// stencils on the boundary band. Exact for quadratics.
Vec2Field gradient_fd(const ScalarField2& f);

/// Second derivatives with the same stencil orders as gradient_fd; the mixed
/// derivative is the x2-difference of the x1-difference, so every interior
/// node uses the four-corner cross stencil.
SymMat2Field hessian_fd(const ScalarField2& f);

/// Node-indicator quadrature: sum over nodes with |x| <= r of f * h^2.
double integrate_disk(const ScalarField2& f, double r);

/// max |f| over nodes with |x| <= r.
double sup_norm_disk(const ScalarField2& f, double r);

/// Radial cutoff equal to 1 on B_{r1} and 0 outside B_{r2}, built from the
/// quintic smoothstep in radius (C^2). The gradient is stored analytically.
struct CutoffProfile {
    double inner_radius;
    double outer_radius;
    ScalarField2 phi;
    Vec2Field dphi;
    /// Certified bound on |D phi|: max of the quintic slope, 15/8 / (r2 - r1).
    double gradient_bound;

    double value_at(double radius) const;
    double radial_derivative(double radius) const;
    /// Closed form of the continuum integral of |D phi|^2 over the plane.
    double dphi_l2_squared() const;
};

CutoffProfile make_cutoff(double inner_radius, double outer_radius, const Grid2& grid);

}  // namespace lmce
