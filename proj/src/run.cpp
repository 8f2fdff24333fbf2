#include "lmce/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lmce/error.hpp"
#include "lmce/geometry.hpp"
#include "lmce/identities.hpp"
#include "lmce/inequalities.hpp"
#include "lmce/solver.hpp"

namespace lmce {

namespace {

using Clock = std::chrono::steady_clock;
using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    return d;
}

long long to_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long d = 0;
    try {
        d = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
    return d;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: " + key + " expects a boolean, got '" + v + "'");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& v) {
    if (key == "L") cfg.half_width = to_double(key, v);
    else if (key == "n") cfg.n = static_cast<int>(to_integer(key, v));
    else if (key == "family") cfg.family = v;
    else if (key == "a") cfg.a = to_double(key, v);
    else if (key == "theta1") cfg.theta1 = to_double(key, v);
    else if (key == "theta2") cfg.theta2 = to_double(key, v);
    else if (key == "epsilon") cfg.epsilon = to_double(key, v);
    else if (key == "field_file") cfg.field_file = v;
    else if (key == "source") cfg.source = v;
    else if (key == "delta") cfg.delta = to_double(key, v);
    else if (key == "c") cfg.c = to_double(key, v);
    else if (key == "A") cfg.A = (v == "fit") ? std::nullopt : std::optional<double>(to_double(key, v));
    else if (key == "jacobi_budget_factor") cfg.jacobi_budget_factor = to_double(key, v);
    else if (key == "hessian_budget") cfg.hessian_budget = to_double(key, v);
    else if (key == "R") cfg.R = to_double(key, v);
    else if (key == "regime") cfg.regime = v;
    else if (key == "cutoff_r1") cfg.cutoff_r1 = to_double(key, v);
    else if (key == "cutoff_r2") cfg.cutoff_r2 = to_double(key, v);
    else if (key == "checks") {
        const auto items = split_list(v);
        if (items.size() == 1 && items[0] == "all") cfg.checks = known_checks();
        else cfg.checks = items;
    }
    else if (key == "trials") cfg.trials = static_cast<int>(to_integer(key, v));
    else if (key == "seed") {
        const long long s = to_integer(key, v);
        if (s < 0) throw std::invalid_argument("config: seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    else if (key == "out") cfg.out = v;
    else if (key == "input") cfg.input = v;
    else if (key == "sweep_param") cfg.sweep_param = v;
    else if (key == "sweep_values") {
        cfg.sweep_values.clear();
        for (const auto& item : split_list(v)) cfg.sweep_values.push_back(to_double(key, item));
    }
    else if (key == "newton_tol") cfg.newton_tol = to_double(key, v);
    else if (key == "max_newton") cfg.max_newton = static_cast<int>(to_integer(key, v));
    else if (key == "linear_tol") cfg.linear_tol = to_double(key, v);
    else if (key == "heatmaps") cfg.heatmaps = to_bool(key, v);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::string json_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_number(v.get<double>());
    throw std::invalid_argument("config: unsupported JSON value " + v.dump());
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : "") + items[k];
    return out;
}

AnalyticFunction family_function(const RunConfig& cfg) {
    if (cfg.family == "quadratic") return quadratic_family(cfg.a);
    if (cfg.family == "anisotropic") return anisotropic_family(cfg.theta1, cfg.theta2);
    if (cfg.family == "perturbed") return perturbed_family(cfg.epsilon);
    throw std::invalid_argument("config: family '" + cfg.family + "' has no analytic form");
}

SolverConfig solver_config(const RunConfig& cfg) {
    SolverConfig s;
    s.tolerance = cfg.newton_tol;
    s.max_iterations = cfg.max_newton;
    s.linear.tolerance = cfg.linear_tol;
    return s;
}

SlopeConstants slope_constants(const RunConfig& cfg) {
    SlopeConstants K;
    K.delta = cfg.delta;
    K.c = cfg.c;
    K.A = cfg.A.value_or(0.0);
    return K;
}

std::optional<Regime> requested_regime(const RunConfig& cfg) {
    if (cfg.regime == "case1") return Regime::Case1;
    if (cfg.regime == "case2") return Regime::Case2;
    return std::nullopt;
}

CheckEntry from_identity(const IdentityReport& r) {
    CheckEntry e;
    e.name = r.name;
    e.kind = "identity";
    e.tolerance_class = to_string(r.tolerance_class);
    e.pass = r.pass;
    e.lhs = r.max_residual;
    e.rhs = r.tolerance;
    e.margin = r.tolerance - r.max_residual;
    e.tolerance = r.tolerance;
    e.values = r.details;
    e.values.emplace_back("at_x1", r.at_x1);
    e.values.emplace_back("at_x2", r.at_x2);
    return e;
}

CheckEntry from_inequality(const InequalityReport& r) {
    CheckEntry e;
    e.name = r.name;
    e.kind = "inequality";
    e.tolerance_class = "slack";
    e.pass = r.pass;
    e.lhs = r.lhs;
    e.rhs = r.rhs;
    e.margin = r.margin;
    e.tolerance = r.slack;
    e.excluded = r.excluded;
    e.values = r.constants;
    e.note = r.note;
    return e;
}

CheckEntry failed_precondition(const std::string& name, const std::string& kind, const std::exception& err) {
    CheckEntry e;
    e.name = name;
    e.kind = kind;
    e.tolerance_class = kind == "identity" ? "algebraic" : "slack";
    e.pass = false;
    e.lhs = e.rhs = e.margin = std::numeric_limits<double>::quiet_NaN();
    e.note = std::string("precondition: ") + err.what();
    return e;
}

// Everything a verification run needs about the field under test.
struct Subject {
    ScalarField2 u;
    ScalarField2 psi;
    ProblemRegime regime;
};

class Timer {
public:
    explicit Timer(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}
    template <class F>
    auto operator()(const std::string& phase, F&& f) {
        const auto t0 = Clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            sink_.emplace_back(phase, seconds_since(t0));
        } else {
            auto out = f();
            sink_.emplace_back(phase, seconds_since(t0));
            return out;
        }
    }

private:
    static double seconds_since(Clock::time_point t0) {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }
    std::vector<std::pair<std::string, double>>& sink_;
};

CheckEntry run_check(const std::string& name, const Subject& s, const GeometryBundle& B, const RunConfig& cfg,
                     double fitted_A) {
    const bool identity = name == "complex_factorization" || name == "volume_formula" || name == "slope_volume" ||
                          name == "form_equivalence" || name == "cutoff_volume" || name == "coordinate_laplacian";
    const SlopeConstants K = slope_constants(cfg);
    try {
        if (name == "complex_factorization") return from_identity(check_complex_factorization(B));
        if (name == "volume_formula") return from_identity(check_volume_formula(B, cfg.delta));
        if (name == "slope_volume") return from_identity(check_slope_volume(B));
        if (name == "form_equivalence") return from_identity(check_form_equivalence(s.u, s.psi));
        if (name == "cutoff_volume") {
            return from_identity(
                check_cutoff_volume_identity(B, make_cutoff(cfg.cutoff_r1, cfg.cutoff_r2, s.u.grid()), s.psi));
        }
        if (name == "coordinate_laplacian") {
            return from_identity(check_coordinate_laplacian(B, s.psi, std::min(cfg.cutoff_r2, s.u.grid().half_width())));
        }
        if (name == "jacobi_pointwise") {
            JacobiOptions opt;
            opt.radius = cfg.cutoff_r2;
            opt.budget_factor = cfg.jacobi_budget_factor;
            return from_inequality(check_jacobi_pointwise(B, K, opt));
        }
        if (name == "subharmonic") {
            SubharmonicOptions opt;
            opt.A = cfg.A;
            opt.trials = cfg.trials;
            opt.seed = cfg.seed;
            return from_inequality(check_subharmonic_modified_slope(B, K, opt));
        }
        SlopeConstants with_a = K;
        with_a.A = fitted_A;
        if (name == "weak_max_principle") {
            return from_inequality(check_weak_max_principle(modified_slope(B, with_a), cfg.trials, cfg.seed));
        }
        if (name == "super_iso") return from_inequality(check_super_iso(modified_slope(B, with_a), cfg.trials, cfg.seed));
        if (name == "jacobi_integral") {
            return from_inequality(check_jacobi_integral(B, make_cutoff(cfg.cutoff_r1, cfg.cutoff_r2, s.u.grid()), K));
        }
        if (name == "volume_bound") {
            if (s.regime != ProblemRegime::Case1 && s.regime != ProblemRegime::Case2) {
                throw PreconditionError(std::string("volume bound needs a case1 or case2 phase, got ") +
                                        to_string(s.regime));
            }
            return from_inequality(check_volume_bound(
                s.u, B, s.regime == ProblemRegime::Case1 ? Regime::Case1 : Regime::Case2, cfg.delta));
        }
        if (name == "hessian_estimate") {
            return from_inequality(check_hessian_estimate(s.u, cfg.R, requested_regime(cfg), cfg.delta, cfg.hessian_budget));
        }
    } catch (const PreconditionError& err) {
        return failed_precondition(name, identity ? "identity" : "inequality", err);
    }
    throw std::invalid_argument("unknown check '" + name + "'");
}

std::string values_text(const std::vector<std::pair<std::string, double>>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out += ';';
        out += values[k].first + "=" + format_number(values[k].second);
    }
    return out;
}

ordered_json number_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

int exit_from_checks(const std::vector<CheckEntry>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& e) { return e.pass; }) ? kExitOk
                                                                                                 : kExitCheckFailed;
}

struct SolvedSubject {
    ManufacturedProblem problem;
    SolveState state;
};

SolvedSubject solve_selected(const RunConfig& cfg, RunReport& report) {
    Timer timed(report.timings);
    const Grid2 grid(cfg.half_width, cfg.n);
    ManufacturedProblem prob = timed("manufacture", [&] { return manufacture(family_function(cfg), grid, cfg.delta); });
    SolveState st = timed("solve", [&] { return newton_solve(prob.phase, prob.boundary, solver_config(cfg)); });

    CsvTable history{{"iteration", "residual", "damping", "linear_iterations"}, {}};
    for (std::size_t k = 0; k < st.residual_history.size(); ++k) {
        history.rows.push_back({std::to_string(k), format_number(st.residual_history[k]),
                                k ? format_number(st.damping[k - 1]) : "",
                                k ? std::to_string(st.linear_iterations[k - 1]) : ""});
    }
    report.tables["solve_history.csv"] = std::move(history);

    SolveSummary sum;
    sum.converged = st.converged;
    sum.iterations = st.iterations();
    sum.final_residual = st.residual_history.back();
    sum.certified_residual = phase_residual(st.u, prob.phase).max_abs();
    double err = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        err = std::max(err, std::abs(st.u.values()[k] - prob.u_exact.values()[k]));
    sum.error_vs_exact = err;
    report.solve = sum;
    return {std::move(prob), std::move(st)};
}

CheckEntry certification_entry(const SolveSummary& sum, double tol) {
    CheckEntry e;
    e.name = "residual_certification";
    e.kind = "solver";
    e.tolerance_class = "algebraic";
    e.lhs = sum.certified_residual;
    e.rhs = tol;
    e.tolerance = tol;
    // round-off allowance between the two evaluation paths
    e.margin = tol - sum.certified_residual;
    e.pass = sum.converged && sum.certified_residual <= tol + 1e-13;
    e.values = {{"iterations", static_cast<double>(sum.iterations)},
                {"final_residual", sum.final_residual},
                {"error_vs_exact", sum.error_vs_exact}};
    return e;
}

}  // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {
        "complex_factorization", "volume_formula", "slope_volume",    "form_equivalence",
        "cutoff_volume",         "coordinate_laplacian", "jacobi_pointwise", "subharmonic",
        "weak_max_principle",    "super_iso",      "jacobi_integral", "volume_bound",
        "hessian_estimate"};
    return names;
}

void RunConfig::validate() const {
    if (!(half_width > 0.0)) throw std::invalid_argument("config: L must be positive");
    if (n < 5) throw std::invalid_argument("config: n must be at least 5");
    if (!(delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("config: c must lie in (0, 1]");
    if (A && !(*A >= 0.0)) throw std::invalid_argument("config: A must be non-negative or 'fit'");
    static const std::set<std::string> families = {"quadratic", "anisotropic", "perturbed", "field"};
    if (!families.count(family)) throw std::invalid_argument("config: unknown family '" + family + "'");
    if (family == "field" && field_file.empty()) throw std::invalid_argument("config: family 'field' needs field_file");
    if (source != "manufactured" && source != "solve") throw std::invalid_argument("config: unknown source '" + source + "'");
    if (family == "field" && source == "solve") throw std::invalid_argument("config: field input cannot be solved");
    if (regime != "auto" && regime != "case1" && regime != "case2") {
        throw std::invalid_argument("config: unknown regime '" + regime + "'");
    }
    for (const auto& name : checks) {
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end()) {
            throw std::invalid_argument("config: unknown check '" + name + "'");
        }
    }
    std::set<std::string> unique(checks.begin(), checks.end());
    if (unique.size() != checks.size()) throw std::invalid_argument("config: a check is listed twice");
    if (trials <= 0) throw std::invalid_argument("config: trials must be positive");
    if (sweep_param != "a" && sweep_param != "epsilon" && sweep_param != "A" && sweep_param != "n") {
        throw std::invalid_argument("config: unknown sweep_param '" + sweep_param + "'");
    }
    if (sweep_values.empty()) throw std::invalid_argument("config: sweep_values is empty");
    if (!(newton_tol > 0.0) || !(linear_tol > 0.0) || max_newton <= 0) {
        throw std::invalid_argument("config: solver tolerances must be positive");
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& err) {
            throw std::invalid_argument(std::string("config: invalid JSON: ") + err.what());
        }
        if (!j.is_object()) throw std::invalid_argument("config: JSON config must be an object");
        for (const auto& [key, value] : j.items()) {
            if (value.is_array()) {
                std::vector<std::string> items;
                for (const auto& item : value) items.push_back(json_scalar(item));
                apply_key(cfg, key, join(items));
            } else {
                apply_key(cfg, key, json_scalar(value));
            }
        }
    } else {
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
            }
            apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::runtime_error& err) {
        throw std::invalid_argument(err.what());
    }
    return parse_config(text);
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
    std::vector<std::string> sweep;
    for (double v : cfg.sweep_values) sweep.push_back(format_number(v));
    return {{"L", format_number(cfg.half_width)},
            {"n", std::to_string(cfg.n)},
            {"family", cfg.family},
            {"a", format_number(cfg.a)},
            {"theta1", format_number(cfg.theta1)},
            {"theta2", format_number(cfg.theta2)},
            {"epsilon", format_number(cfg.epsilon)},
            {"field_file", cfg.field_file},
            {"source", cfg.source},
            {"delta", format_number(cfg.delta)},
            {"c", format_number(cfg.c)},
            {"A", cfg.A ? format_number(*cfg.A) : "fit"},
            {"jacobi_budget_factor", format_number(cfg.jacobi_budget_factor)},
            {"hessian_budget", format_number(cfg.hessian_budget)},
            {"R", format_number(cfg.R)},
            {"regime", cfg.regime},
            {"cutoff_r1", format_number(cfg.cutoff_r1)},
            {"cutoff_r2", format_number(cfg.cutoff_r2)},
            {"checks", join(cfg.checks)},
            {"trials", std::to_string(cfg.trials)},
            {"seed", std::to_string(cfg.seed)},
            {"out", cfg.out},
            {"input", cfg.input},
            {"sweep_param", cfg.sweep_param},
            {"sweep_values", join(sweep)},
            {"newton_tol", format_number(cfg.newton_tol)},
            {"max_newton", std::to_string(cfg.max_newton)},
            {"linear_tol", format_number(cfg.linear_tol)},
            {"heatmaps", cfg.heatmaps ? "true" : "false"}};
}

RunReport cmd_solve(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.family == "field") throw std::invalid_argument("solve: family 'field' has no exact solution to solve for");
    RunReport report;
    report.command = "solve";
    report.config = cfg;
    SolvedSubject solved = solve_selected(cfg, report);
    report.checks.push_back(certification_entry(*report.solve, cfg.newton_tol));
    report.fields.emplace_back("u_solved", solved.state.u);
    report.fields.emplace_back("phase", solved.problem.phase);
    if (!solved.state.converged) {
        report.exit_code = kExitNonConvergence;
    } else {
        report.exit_code = exit_from_checks(report.checks);
    }
    return report;
}

RunReport cmd_verify(const RunConfig& cfg) {
    cfg.validate();
    RunReport report;
    report.command = "verify";
    report.config = cfg;
    Timer timed(report.timings);

    std::optional<Subject> subject;
    if (cfg.family == "field") {
        ScalarField2 u = timed("load", [&] {
            try {
                return read_field_csv(cfg.field_file);
            } catch (const std::runtime_error& err) {
                throw std::invalid_argument(err.what());
            }
        });
        GeometryBundle B = bundle(u);
        subject = Subject{u, B.phase, classify_phase(B.phase, cfg.delta)};
    } else if (cfg.source == "solve") {
        SolvedSubject solved = solve_selected(cfg, report);
        report.checks.push_back(certification_entry(*report.solve, cfg.newton_tol));
        if (!solved.state.converged) {
            report.exit_code = kExitNonConvergence;
            return report;
        }
        subject = Subject{solved.state.u, solved.problem.phase, solved.problem.regime};
    } else {
        const Grid2 grid(cfg.half_width, cfg.n);
        ManufacturedProblem prob =
            timed("manufacture", [&] { return manufacture(family_function(cfg), grid, cfg.delta); });
        subject = Subject{prob.u_exact, prob.phase, prob.regime};
    }

    const GeometryBundle B = timed("bundle", [&] { return bundle(subject->u); });

    double fitted_A = cfg.A.value_or(0.0);
    if (!cfg.A) {
        try {
            SubharmonicOptions opt;
            opt.trials = 1;
            fitted_A = check_subharmonic_modified_slope(B, slope_constants(cfg), opt).constant("A_hat");
            if (!std::isfinite(fitted_A)) fitted_A = 0.0;
        } catch (const PreconditionError&) {
            fitted_A = 0.0;
        }
    }

    timed("checks", [&] {
        for (const auto& name : cfg.checks) report.checks.push_back(run_check(name, *subject, B, cfg, fitted_A));
    });
    report.fields.emplace_back("u", subject->u);
    report.fields.emplace_back("phase", subject->psi);
    report.fields.emplace_back("slope", B.slope);
    report.exit_code = exit_from_checks(report.checks);
    return report;
}

RunReport cmd_sweep(const RunConfig& cfg) {
    cfg.validate();
    RunReport report;
    report.command = "sweep";
    report.config = cfg;
    Timer timed(report.timings);
    const Grid2 base(cfg.half_width, cfg.n);
    CsvTable table;
    bool all_pass = true;

    timed("sweep", [&] {
        if (cfg.sweep_param == "a" || cfg.sweep_param == "epsilon") {
            table.header = {cfg.sweep_param, "regime", "L", "G", "C_star", "pass"};
            for (double v : cfg.sweep_values) {
                const AnalyticFunction fn = cfg.sweep_param == "a" ? quadratic_family(v) : perturbed_family(v);
                const ScalarField2 u = sample(fn.value, base);
                try {
                    const InequalityReport r =
                        check_hessian_estimate(u, cfg.R, requested_regime(cfg), cfg.delta, cfg.hessian_budget);
                    all_pass = all_pass && r.pass;
                    table.rows.push_back({format_number(v), r.constant("regime") == 1.0 ? "case1" : "case2",
                                          format_number(r.constant("L")), format_number(r.constant("G")),
                                          format_number(r.constant("C_star")), r.pass ? "true" : "false"});
                } catch (const PreconditionError&) {
                    all_pass = false;
                    table.rows.push_back({format_number(v), to_string(classify_phase(bundle(u).phase, cfg.delta)),
                                          "nan", "nan", "nan", "false"});
                }
            }
        } else if (cfg.sweep_param == "A") {
            if (cfg.family == "field") throw std::invalid_argument("sweep: A sweep needs an analytic family");
            table.header = {"A", "min_lap", "lap_b_min", "pass"};
            const ManufacturedProblem prob = manufacture(family_function(cfg), base, cfg.delta);
            const GeometryBundle B = bundle(prob.u_exact);
            for (double v : cfg.sweep_values) {
                SubharmonicOptions opt;
                opt.A = v;
                opt.trials = cfg.trials;
                opt.seed = cfg.seed;
                try {
                    const InequalityReport r = check_subharmonic_modified_slope(B, slope_constants(cfg), opt);
                    all_pass = all_pass && r.pass;
                    table.rows.push_back({format_number(v), format_number(r.constant("min_lap")),
                                          format_number(r.constant("lap_b_min")), r.pass ? "true" : "false"});
                } catch (const PreconditionError&) {
                    all_pass = false;
                    table.rows.push_back({format_number(v), "nan", "nan", "false"});
                }
            }
        } else {
            if (cfg.family == "field") throw std::invalid_argument("sweep: n sweep needs an analytic family");
            table.header = {"n", "h", "C_hat", "form_residual", "factorization_residual", "pass"};
            for (double v : cfg.sweep_values) {
                const Grid2 grid(cfg.half_width, static_cast<int>(std::lround(v)));
                const ManufacturedProblem prob = manufacture(family_function(cfg), grid, cfg.delta);
                const GeometryBundle B = bundle(prob.u_exact);
                JacobiOptions jopt;
                jopt.radius = std::min(cfg.cutoff_r2, grid.half_width());
                jopt.budget_factor = cfg.jacobi_budget_factor;
                const InequalityReport jac = check_jacobi_pointwise(B, slope_constants(cfg), jopt);
                const IdentityReport form = check_form_equivalence(prob.u_exact, prob.phase);
                const IdentityReport fac = check_complex_factorization(B);
                const bool pass = jac.pass && form.pass && fac.pass;
                all_pass = all_pass && pass;
                table.rows.push_back({std::to_string(grid.nodes_per_axis()), format_number(grid.spacing()),
                                      format_number(jac.constant("C_hat")), format_number(form.max_residual),
                                      format_number(fac.max_residual), pass ? "true" : "false"});
            }
        }
    });
    report.tables["sweep.csv"] = std::move(table);
    report.exit_code = all_pass ? kExitOk : kExitCheckFailed;
    return report;
}

CsvTable cmd_report(const std::filesystem::path& input_dir) {
    if (!std::filesystem::is_directory(input_dir)) {
        throw std::invalid_argument("report: '" + input_dir.string() + "' is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(input_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        if (entry.path().filename() == "consolidated.csv") continue;
        const std::string text = read_text(entry.path());
        if (text.rfind("# lmce-field", 0) == 0) continue;  // field files are not tables
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    CsvTable merged;
    merged.header = {"source"};
    std::vector<std::pair<std::string, CsvTable>> tables;
    for (const auto& path : files) {
        CsvTable t = parse_csv(read_text(path));
        for (const auto& col : t.header)
            if (std::find(merged.header.begin(), merged.header.end(), col) == merged.header.end())
                merged.header.push_back(col);
        tables.emplace_back(std::filesystem::relative(path, input_dir).generic_string(), std::move(t));
    }
    for (const auto& [source, t] : tables) {
        for (const auto& row : t.rows) {
            std::vector<std::string> out(merged.header.size());
            out[0] = source;
            for (std::size_t k = 0; k < t.header.size() && k < row.size(); ++k) {
                const auto pos = std::find(merged.header.begin(), merged.header.end(), t.header[k]);
                out[static_cast<std::size_t>(pos - merged.header.begin())] = row[k];
            }
            merged.rows.push_back(std::move(out));
        }
    }
    return merged;
}

void write_run_outputs(const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    if (!report.checks.empty()) {
        CsvTable checks{{"check", "kind", "class", "pass", "lhs", "rhs", "margin", "tolerance", "excluded", "values", "note"},
                        {}};
        for (const auto& e : report.checks) {
            checks.rows.push_back({e.name, e.kind, e.tolerance_class, e.pass ? "true" : "false", format_number(e.lhs),
                                   format_number(e.rhs), format_number(e.margin), format_number(e.tolerance),
                                   std::to_string(e.excluded), values_text(e.values), e.note});
        }
        write_text(dir / "checks.csv", to_csv(checks));
    }
    for (const auto& [name, table] : report.tables) write_text(dir / name, to_csv(table));

    ordered_json images = ordered_json::object();
    for (const auto& [name, field] : report.fields) {
        write_field_csv(field, dir / (name + ".csv"));
        if (report.config.heatmaps) {
            const HeatmapRange range = write_pgm(field, dir / (name + ".pgm"));
            images[name] = {{"file", name + ".pgm"}, {"min", number_json(range.min)}, {"max", number_json(range.max)}};
        }
    }

    ordered_json j;
    j["command"] = report.command;
    ordered_json config = ordered_json::object();
    for (const auto& [k, v] : config_echo(report.config)) config[k] = v;
    j["config"] = config;
    ordered_json checks = ordered_json::array();
    for (const auto& e : report.checks) {
        ordered_json values = ordered_json::object();
        for (const auto& [k, v] : e.values) values[k] = number_json(v);
        checks.push_back({{"check", e.name},
                          {"kind", e.kind},
                          {"class", e.tolerance_class},
                          {"pass", e.pass},
                          {"lhs", number_json(e.lhs)},
                          {"rhs", number_json(e.rhs)},
                          {"margin", number_json(e.margin)},
                          {"tolerance", number_json(e.tolerance)},
                          {"excluded", e.excluded},
                          {"values", values},
                          {"note", e.note}});
    }
    j["checks"] = checks;
    if (report.solve) {
        j["solve"] = {{"converged", report.solve->converged},
                      {"iterations", report.solve->iterations},
                      {"final_residual", number_json(report.solve->final_residual)},
                      {"certified_residual", number_json(report.solve->certified_residual)},
                      {"error_vs_exact", number_json(report.solve->error_vs_exact)}};
    }
    if (!images.empty()) j["heatmaps"] = images;
    ordered_json timings = ordered_json::object();
    for (const auto& [k, v] : report.timings) timings[k] = v;
    j["timings_seconds"] = timings;
    j["exit_code"] = report.exit_code;
    write_text(dir / "summary.json", j.dump(2) + "\n");
}

}  // namespace lmce
