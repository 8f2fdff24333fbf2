#include <optional>
#include <string>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmce/analytic.hpp"
#include "lmce/error.hpp"
#include "lmce/geometry.hpp"
#include "lmce/grid.hpp"
#include "lmce/identities.hpp"
#include "lmce/inequalities.hpp"
#include "lmce/io.hpp"
#include "lmce/solver.hpp"

namespace py = pybind11;
using namespace lmce;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Fields cross the boundary as (n, n) arrays indexed [j, i], i.e. row = x2.
Array to_array(const ScalarField2& f) {
    const auto n = static_cast<py::ssize_t>(f.grid().nodes_per_axis());
    Array out({n, n});
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

ScalarField2 from_array(const Grid2& grid, const Array& a) {
    const auto n = static_cast<py::ssize_t>(grid.nodes_per_axis());
    if (a.ndim() != 2 || a.shape(0) != n || a.shape(1) != n) {
        throw std::invalid_argument("expected an array of shape (" + std::to_string(n) + ", " + std::to_string(n) + ")");
    }
    return ScalarField2(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

py::tuple sym_tuple(const SymMat2Field& m) { return py::make_tuple(to_array(m.m11), to_array(m.m12), to_array(m.m22)); }

py::dict pairs_dict(const std::vector<std::pair<std::string, double>>& items) {
    py::dict d;
    for (const auto& [k, v] : items) d[py::str(k)] = v;
    return d;
}

Regime parse_regime(const std::string& s) {
    if (s == "case1") return Regime::Case1;
    if (s == "case2") return Regime::Case2;
    throw std::invalid_argument("regime must be 'case1' or 'case2'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grid, geometry, identity and inequality checks and the Newton solver";

    static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
    static py::exception<NonConvergenceError> nonconvergence(m, "NonConvergenceError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const PreconditionError& e) {
            py::set_error(precondition, e.what());
        } catch (const NonConvergenceError& e) {
            py::set_error(nonconvergence, e.what());
        }
    });

    py::class_<Grid2>(m, "Grid2")
        .def(py::init<double, int>(), py::arg("half_width"), py::arg("n"))
        .def_property_readonly("half_width", &Grid2::half_width)
        .def_property_readonly("n", &Grid2::nodes_per_axis)
        .def_property_readonly("spacing", &Grid2::spacing)
        .def("coord", &Grid2::coord)
        .def("coords", [](const Grid2& g) {
            Array out(static_cast<py::ssize_t>(g.nodes_per_axis()));
            for (int i = 0; i < g.nodes_per_axis(); ++i) out.mutable_data()[i] = g.coord(i);
            return out;
        })
        .def("__repr__", [](const Grid2& g) {
            return "Grid2(L=" + format_number(g.half_width()) + ", n=" + std::to_string(g.nodes_per_axis()) + ")";
        });

    py::class_<ScalarField2>(m, "ScalarField2")
        .def(py::init(&from_array), py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", &ScalarField2::grid)
        .def("array", &to_array)
        .def("max_abs", &ScalarField2::max_abs)
        .def("min", &ScalarField2::min)
        .def("max", &ScalarField2::max);

    m.def("sample", &sample, py::arg("f"), py::arg("grid"));
    m.def("gradient_fd", [](const ScalarField2& f) {
        const Vec2Field d = gradient_fd(f);
        return py::make_tuple(to_array(d.x1), to_array(d.x2));
    });
    m.def("hessian_fd", [](const ScalarField2& f) { return sym_tuple(hessian_fd(f)); });
    m.def("integrate_disk", &integrate_disk, py::arg("f"), py::arg("r"));
    m.def("sup_norm_disk", &sup_norm_disk, py::arg("f"), py::arg("r"));
    m.def("eigen_sym2", &eigen_sym2);

    py::class_<CutoffProfile>(m, "CutoffProfile")
        .def_readonly("inner_radius", &CutoffProfile::inner_radius)
        .def_readonly("outer_radius", &CutoffProfile::outer_radius)
        .def_readonly("gradient_bound", &CutoffProfile::gradient_bound)
        .def_property_readonly("phi", [](const CutoffProfile& c) { return to_array(c.phi); })
        .def("value_at", &CutoffProfile::value_at)
        .def("dphi_l2_squared", &CutoffProfile::dphi_l2_squared);
    m.def("make_cutoff", &make_cutoff, py::arg("r1"), py::arg("r2"), py::arg("grid"));

    py::class_<GeometryBundle>(m, "GeometryBundle")
        .def_property_readonly("hessian", [](const GeometryBundle& b) { return sym_tuple(b.hessian); })
        .def_property_readonly("lambda1", [](const GeometryBundle& b) { return to_array(b.lambda1); })
        .def_property_readonly("lambda2", [](const GeometryBundle& b) { return to_array(b.lambda2); })
        .def_property_readonly("phase", [](const GeometryBundle& b) { return to_array(b.phase); })
        .def_property_readonly("sigma1", [](const GeometryBundle& b) { return to_array(b.sigma1); })
        .def_property_readonly("sigma2", [](const GeometryBundle& b) { return to_array(b.sigma2); })
        .def_property_readonly("volume", [](const GeometryBundle& b) { return to_array(b.volume); })
        .def_property_readonly("metric", [](const GeometryBundle& b) { return sym_tuple(b.metric); })
        .def_property_readonly("inverse_metric", [](const GeometryBundle& b) { return sym_tuple(b.inverse_metric); })
        .def_property_readonly("slope", [](const GeometryBundle& b) { return to_array(b.slope); })
        .def_property_readonly("phase_field", [](const GeometryBundle& b) { return b.phase; });
    m.def("bundle", &bundle, py::arg("u"));
    m.def("laplace_beltrami", [](const ScalarField2& f, const GeometryBundle& B) { return to_array(laplace_beltrami(f, B)); });

    py::class_<SlopeConstants>(m, "SlopeConstants")
        .def(py::init([](double delta, double A, double c) {
                 SlopeConstants K;
                 K.delta = delta;
                 K.A = A;
                 K.c = c;
                 K.validate();
                 return K;
             }),
             py::arg("delta") = 0.3, py::arg("A") = 0.0, py::arg("c") = 0.5)
        .def_readwrite("delta", &SlopeConstants::delta)
        .def_readwrite("A", &SlopeConstants::A)
        .def_readwrite("c", &SlopeConstants::c);
    m.def("modified_slope", [](const GeometryBundle& B, const SlopeConstants& K) { return modified_slope(B, K); });

    py::class_<IdentityReport>(m, "IdentityReport")
        .def_readonly("name", &IdentityReport::name)
        .def_readonly("max_residual", &IdentityReport::max_residual)
        .def_readonly("tolerance", &IdentityReport::tolerance)
        .def_readonly("passed", &IdentityReport::pass)
        .def_property_readonly("tolerance_class", [](const IdentityReport& r) { return to_string(r.tolerance_class); })
        .def_property_readonly("details", [](const IdentityReport& r) { return pairs_dict(r.details); });
    py::class_<InequalityReport>(m, "InequalityReport")
        .def_readonly("name", &InequalityReport::name)
        .def_readonly("lhs", &InequalityReport::lhs)
        .def_readonly("rhs", &InequalityReport::rhs)
        .def_readonly("margin", &InequalityReport::margin)
        .def_readonly("slack", &InequalityReport::slack)
        .def_readonly("passed", &InequalityReport::pass)
        .def_readonly("excluded", &InequalityReport::excluded)
        .def_readonly("note", &InequalityReport::note)
        .def_property_readonly("constants", [](const InequalityReport& r) { return pairs_dict(r.constants); });

    m.def("check_complex_factorization", &check_complex_factorization);
    m.def("check_volume_formula", &check_volume_formula, py::arg("bundle"), py::arg("delta") = 0.3);
    m.def("check_form_equivalence",
          [](const ScalarField2& u, const ScalarField2& psi) { return check_form_equivalence(u, psi); });
    m.def("check_weak_max_principle", &check_weak_max_principle, py::arg("f"), py::arg("trials") = 200,
          py::arg("seed") = 0, py::arg("radius") = 2.0);
    m.def("check_super_iso", &check_super_iso, py::arg("f"), py::arg("trials") = 200, py::arg("seed") = 0);
    m.def(
        "check_jacobi_pointwise",
        [](const GeometryBundle& B, const SlopeConstants& K) { return check_jacobi_pointwise(B, K); },
        py::arg("bundle"), py::arg("constants") = SlopeConstants{});
    m.def(
        "check_volume_bound",
        [](const ScalarField2& u, const GeometryBundle& B, const std::string& regime, double delta) {
            return check_volume_bound(u, B, parse_regime(regime), delta);
        },
        py::arg("u"), py::arg("bundle"), py::arg("regime"), py::arg("delta") = 0.3);
    m.def(
        "check_hessian_estimate",
        [](const ScalarField2& u, double R, std::optional<std::string> regime, double budget) {
            std::optional<Regime> r;
            if (regime) r = parse_regime(*regime);
            return check_hessian_estimate(u, R, r, 0.3, budget);
        },
        py::arg("u"), py::arg("R") = 4.0, py::arg("regime") = py::none(), py::arg("budget") = 5.0);
    m.def("fit_estimate_constant", &fit_estimate_constant, py::arg("L"), py::arg("G"));

    py::class_<AnalyticFunction>(m, "AnalyticFunction")
        .def_readonly("name", &AnalyticFunction::name)
        .def("__call__", [](const AnalyticFunction& f, double x1, double x2) { return f.value(x1, x2); })
        .def("gradient", [](const AnalyticFunction& f, double x1, double x2) { return f.gradient(x1, x2); })
        .def("hessian", [](const AnalyticFunction& f, double x1, double x2) { return f.hessian(x1, x2); });
    m.def("quadratic_family", &quadratic_family, py::arg("a"));
    m.def("anisotropic_family", &anisotropic_family, py::arg("theta1"), py::arg("theta2"));
    m.def("perturbed_family", &perturbed_family, py::arg("epsilon"));
    m.def("rescale_to_unit_ball", &rescale_to_unit_ball, py::arg("u"), py::arg("R"));

    py::class_<ManufacturedProblem>(m, "ManufacturedProblem")
        .def_readonly("u_exact", &ManufacturedProblem::u_exact)
        .def_readonly("phase", &ManufacturedProblem::phase)
        .def_readonly("boundary", &ManufacturedProblem::boundary)
        .def_property_readonly("regime", [](const ManufacturedProblem& p) { return to_string(p.regime); });
    m.def("manufacture", &manufacture, py::arg("u"), py::arg("grid"), py::arg("delta") = 0.3);

    py::class_<SolveState>(m, "SolveState")
        .def_readonly("u", &SolveState::u)
        .def_readonly("residual_history", &SolveState::residual_history)
        .def_readonly("damping", &SolveState::damping)
        .def_readonly("converged", &SolveState::converged)
        .def_property_readonly("iterations", &SolveState::iterations);
    m.def(
        "newton_solve",
        [](const ScalarField2& phase, const ScalarField2& boundary, double tol, int max_iterations) {
            SolverConfig cfg;
            cfg.tolerance = tol;
            cfg.max_iterations = max_iterations;
            py::gil_scoped_release release;
            return newton_solve(phase, boundary, cfg);
        },
        py::arg("phase"), py::arg("boundary"), py::arg("tol") = 1e-10, py::arg("max_iterations") = 50);
    m.def("phase_residual", [](const ScalarField2& u, const ScalarField2& psi) { return to_array(phase_residual(u, psi)); });

    m.def("field_to_csv", &field_to_csv);
    m.def("field_from_csv", &field_from_csv);
}
