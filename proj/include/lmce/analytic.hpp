#pragma once

#include <array>
#include <functional>
#include <string>

namespace lmce {

/// A smooth function of (x1, x2) together with its exact first and second
/// derivatives. Hessians are returned as (m11, m12, m22).
struct AnalyticFunction {
    std::string name;
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> gradient;
    std::function<std::array<double, 3>(double, double)> hessian;
};

/// u = a |x|^2 / 2
AnalyticFunction quadratic_family(double a);
/// u = (tan(theta1) x1^2 + tan(theta2) x2^2) / 2, phase theta1 + theta2
AnalyticFunction anisotropic_family(double theta1, double theta2);
/// u = |x|^2 / 2 + eps sin(x1) sin(x2)
AnalyticFunction perturbed_family(double eps);
/// u = x1 x2 (zero phase)
AnalyticFunction saddle_function();

/// u + c0 + c1 x1 + c2 x2
AnalyticFunction add_affine(const AnalyticFunction& u, double c0, double c1, double c2);
/// v(x) = u(s x) / s^2 with s = R / 4: maps a solution on B_R to one on B_4.
AnalyticFunction rescale_to_unit_ball(const AnalyticFunction& u, double R);

}  // namespace lmce
