#include "lmce/analytic.hpp"

#include <cmath>
#include <sstream>

namespace lmce {

namespace {

std::string format(const char* family, std::initializer_list<double> params) {
    std::ostringstream os;
    os.precision(17);
    os << family << '(';
    bool first = true;
    for (double p : params) {
        if (!first) os << ',';
        os << p;
        first = false;
    }
    os << ')';
    return os.str();
}

}  // namespace

AnalyticFunction quadratic_family(double a) {
    return {format("quadratic", {a}),
            [a](double x, double y) { return 0.5 * a * (x * x + y * y); },
            [a](double x, double y) { return std::array{a * x, a * y}; },
            [a](double, double) { return std::array{a, 0.0, a}; }};
}

AnalyticFunction anisotropic_family(double theta1, double theta2) {
    const double k1 = std::tan(theta1), k2 = std::tan(theta2);
    return {format("anisotropic", {theta1, theta2}),
            [=](double x, double y) { return 0.5 * (k1 * x * x + k2 * y * y); },
            [=](double x, double y) { return std::array{k1 * x, k2 * y}; },
            [=](double, double) { return std::array{k1, 0.0, k2}; }};
}

AnalyticFunction perturbed_family(double eps) {
    return {format("perturbed", {eps}),
            [eps](double x, double y) { return 0.5 * (x * x + y * y) + eps * std::sin(x) * std::sin(y); },
            [eps](double x, double y) {
                return std::array{x + eps * std::cos(x) * std::sin(y), y + eps * std::sin(x) * std::cos(y)};
            },
            [eps](double x, double y) {
                const double ss = eps * std::sin(x) * std::sin(y);
                return std::array{1.0 - ss, eps * std::cos(x) * std::cos(y), 1.0 - ss};
            }};
}

AnalyticFunction saddle_function() {
    return {"saddle", [](double x, double y) { return x * y; },
            [](double x, double y) { return std::array{y, x}; },
            [](double, double) { return std::array{0.0, 1.0, 0.0}; }};
}

AnalyticFunction add_affine(const AnalyticFunction& u, double c0, double c1, double c2) {
    return {u.name + format("+affine", {c0, c1, c2}),
            [=](double x, double y) { return u.value(x, y) + c0 + c1 * x + c2 * y; },
            [=](double x, double y) {
                auto g = u.gradient(x, y);
                return std::array{g[0] + c1, g[1] + c2};
            },
            u.hessian};
}

AnalyticFunction rescale_to_unit_ball(const AnalyticFunction& u, double R) {
    const double s = R / 4.0;
    return {u.name + format("@R", {R}),
            [=](double x, double y) { return u.value(s * x, s * y) / (s * s); },
            [=](double x, double y) {
                auto g = u.gradient(s * x, s * y);
                return std::array{g[0] / s, g[1] / s};
            },
            [=](double x, double y) { return u.hessian(s * x, s * y); }};
}

}  // namespace lmce
