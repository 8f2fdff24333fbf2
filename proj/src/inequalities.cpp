#include "lmce/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "lmce/error.hpp"

namespace lmce {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThreeQuarterPi = 0.75 * std::numbers::pi;
// Closed regime boundaries.
constexpr double kRegimeFuzz = 1e-12;
constexpr double kQuadratureSlackFactor = 20.0;

InequalityReport make_report(std::string name, double lhs, double rhs, double slack) {
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.slack = slack;
    r.pass = r.margin >= -slack;
    return r;
}

ScalarField2 gradient_norm(const ScalarField2& f) {
    const Vec2Field d = gradient_fd(f);
    return zip(d.x1, d.x2, [](double a, double b) { return std::hypot(a, b); });
}

double sup_abs_on_disk(const ScalarField2& f, double r) { return sup_norm_disk(f, r); }

ScalarField2 half_square_radius(const Grid2& grid) {
    return sample([](double x, double y) { return 0.5 * (x * x + y * y); }, grid);
}

// ||psi||_{C^{1,1}} over nodes of B_r at least two nodes from the grid edge.
double c11_norm(const ScalarField2& psi, double r) {
    const Grid2& grid = psi.grid();
    const Vec2Field d = gradient_fd(psi);
    const SymMat2Field dd = hessian_fd(psi);
    const int n = grid.nodes_per_axis();
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
    for (int j = 2; j < n - 2; ++j) {
        for (int i = 2; i < n - 2; ++i) {
            if (!grid.in_disk(i, j, r)) continue;
            v0 = std::max(v0, std::abs(psi(i, j)));
            v1 = std::max(v1, std::hypot(d.x1(i, j), d.x2(i, j)));
            const auto [a, b] = eigen_sym2(dd.m11(i, j), dd.m12(i, j), dd.m22(i, j));
            v2 = std::max({v2, std::abs(a), std::abs(b)});
        }
    }
    return v0 + v1 + v2;
}

struct Subdomain {
    bool disk;
    double cx, cy;
    double a, b;  // radius (disk) or half-widths (rectangle)

    // Signed distance to the edge, positive inside.
    double depth(double x, double y) const {
        if (disk) return a - std::hypot(x - cx, y - cy);
        return std::min(a - std::abs(x - cx), b - std::abs(y - cy));
    }
};

Subdomain draw_subdomain(std::mt19937_64& rng, double radius, double min_size) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool disk = unit(rng) < 0.5;
    const double reach = radius - min_size;
    // centre uniform in B_reach
    const double rc = reach * std::sqrt(unit(rng));
    const double th = 2.0 * kPi * unit(rng);
    const double cx = rc * std::cos(th), cy = rc * std::sin(th);
    const double room = radius - rc;
    if (disk) return {true, cx, cy, min_size + (room - min_size) * unit(rng), 0.0};
    // rectangle with corners inside B_radius: half-diagonal at most room
    const double diag = min_size + (room - min_size) * unit(rng);
    const double angle = (0.1 + 0.8 * unit(rng)) * 0.5 * kPi;
    return {false, cx, cy, diag * std::cos(angle), diag * std::sin(angle)};
}

}  // namespace

double InequalityReport::constant(const std::string& key) const {
    for (const auto& [k, v] : constants)
        if (k == key) return v;
    throw std::out_of_range("InequalityReport: no constant named " + key);
}

const char* to_string(Regime r) { return r == Regime::Case1 ? "case1" : "case2"; }

InequalityReport check_weak_max_principle(const ScalarField2& f, int trials, std::uint64_t seed, double radius) {
    const Grid2& grid = f.grid();
    if (trials <= 0) throw std::invalid_argument("check_weak_max_principle: trials must be positive");
    if (radius > grid.half_width()) throw PreconditionError("check_weak_max_principle: radius exceeds grid");
    const double h = grid.spacing();
    const double band = 1.5 * h;
    const double lip = sup_abs_on_disk(gradient_norm(f), radius);
    const double slack = 2.0 * h * lip;

    std::mt19937_64 rng(seed);
    const int n = grid.nodes_per_axis();
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_lhs = 0.0, worst_rhs = 0.0;
    int skipped = 0, failures = 0, run = 0;
    for (int t = 0; t < trials; ++t) {
        const Subdomain s = draw_subdomain(rng, radius, 4.0 * h);
        const double ext = s.disk ? s.a : std::hypot(s.a, s.b);
        const int i0 = std::max(0, static_cast<int>(std::floor((s.cx - ext + grid.half_width()) / h)));
        const int i1 = std::min(n - 1, static_cast<int>(std::ceil((s.cx + ext + grid.half_width()) / h)));
        const int j0 = std::max(0, static_cast<int>(std::floor((s.cy - ext + grid.half_width()) / h)));
        const int j1 = std::min(n - 1, static_cast<int>(std::ceil((s.cy + ext + grid.half_width()) / h)));

        double inner = -std::numeric_limits<double>::infinity();
        double edge = -std::numeric_limits<double>::infinity();
        int inner_count = 0, edge_count = 0;
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const double d = s.depth(grid.coord(i), grid.coord(j));
                if (d < 0.0) continue;
                if (d <= band) {
                    edge = std::max(edge, f(i, j));
                    ++edge_count;
                } else {
                    inner = std::max(inner, f(i, j));
                    ++inner_count;
                }
            }
        }
        if (inner_count == 0 || edge_count == 0) {
            ++skipped;
            continue;
        }
        ++run;
        const double m = edge - inner;
        if (m < -slack) ++failures;
        if (m < worst_margin) {
            worst_margin = m;
            worst_lhs = inner;
            worst_rhs = edge;
        }
    }
    if (run == 0) throw PreconditionError("check_weak_max_principle: every subdomain was degenerate");

    InequalityReport r = make_report("weak_max_principle", worst_lhs, worst_rhs, slack);
    r.pass = failures == 0;
    r.excluded = skipped;
    r.constants = {{"trials_run", static_cast<double>(run)},
                   {"failures", static_cast<double>(failures)},
                   {"lipschitz", lip}};
    return r;
}

InequalityReport check_super_iso(const ScalarField2& f, int trials, std::uint64_t seed) {
    const Grid2& grid = f.grid();
    if (grid.half_width() < 2.0) throw PreconditionError("check_super_iso: grid does not contain B2");
    const int n = grid.nodes_per_axis();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (grid.in_disk(i, j, 2.0) && f(i, j) < 0.0) {
                throw PreconditionError("check_super_iso: f is negative on B2 at (" + std::to_string(grid.coord(i)) +
                                        ", " + std::to_string(grid.coord(j)) + ")");
            }
        }
    }
    const InequalityReport wmp = check_weak_max_principle(f, trials, seed, 2.0);
    if (!wmp.pass) {
        throw PreconditionError("check_super_iso: f violates the weak maximum principle in " +
                                std::to_string(static_cast<int>(wmp.constant("failures"))) + " of " +
                                std::to_string(static_cast<int>(wmp.constant("trials_run"))) + " subdomains");
    }

    const ScalarField2 df = gradient_norm(f);
    const double lhs = sup_norm_disk(f, 1.0);
    const double grad_int = integrate_disk(df, 2.0);
    const double f_int = integrate_disk(f, 2.0);
    const double h = grid.spacing();
    const double slack =
        kQuadratureSlackFactor * h * (2.0 * kPi * 2.0) * (sup_norm_disk(f, 2.0) + sup_norm_disk(df, 2.0));
    InequalityReport r = make_report("super_iso", lhs, grad_int + f_int, slack);
    r.constants = {{"grad_integral", grad_int}, {"f_integral", f_int}, {"wmp_margin", wmp.margin}};
    return r;
}

InequalityReport check_jacobi_pointwise(const GeometryBundle& B, const SlopeConstants& K, const JacobiOptions& opt) {
    K.validate();
    const Grid2& grid = B.grid();
    if (opt.radius > grid.half_width()) throw PreconditionError("check_jacobi_pointwise: radius exceeds grid");
    const ScalarField2 lap = laplace_beltrami(B.slope, B);
    const ScalarField2 grad2 = grad_g_norm2(B.slope, B);

    const int n = grid.nodes_per_axis();
    std::vector<char> coalesced(grid.size(), 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) coalesced[grid.index(i, j)] = K.coalesced(B.lambda1(i, j), B.lambda2(i, j));
    // A coalesced node whose whole stencil is coalesced sits in an umbilic patch where
    // D^2u = (Delta u / 2) I, so b is smooth there and the node stays in.
    const auto umbilic_patch = [&](int i, int j) {
        for (int dj = -2; dj <= 2; ++dj)
            for (int di = -2; di <= 2; ++di)
                if (!coalesced[grid.index(i + di, j + dj)]) return false;
        return true;
    };
    double m = std::numeric_limits<double>::infinity();
    int excluded = 0, used = 0;
    for (int j = 2; j < n - 2; ++j) {
        for (int i = 2; i < n - 2; ++i) {
            if (!grid.in_disk(i, j, opt.radius)) continue;
            if (coalesced[grid.index(i, j)] && !umbilic_patch(i, j)) {
                ++excluded;
                continue;
            }
            ++used;
            m = std::min(m, lap(i, j) - K.c * grad2(i, j));
        }
    }
    if (used == 0) throw PreconditionError("check_jacobi_pointwise: every node was excluded by the eigengap filter");

    const double c_hat = std::max(0.0, -m);
    const double psi_norm = c11_norm(B.phase, opt.radius);
    const double budget = opt.budget_factor * (1.0 + psi_norm);
    InequalityReport r = make_report("jacobi_pointwise", c_hat, budget, 0.0);
    r.excluded = excluded;
    r.constants = {{"m", m}, {"C_hat", c_hat}, {"c", K.c}, {"budget", budget}, {"psi_c11", psi_norm}};
    return r;
}

InequalityReport check_subharmonic_modified_slope(const GeometryBundle& B, const SlopeConstants& K,
                                                  const SubharmonicOptions& opt) {
    K.validate();
    const Grid2& grid = B.grid();
    if (opt.radius > grid.half_width()) throw PreconditionError("check_subharmonic_modified_slope: radius exceeds grid");
    const int n = grid.nodes_per_axis();

    bool negative_phase = true;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (grid.in_disk(i, j, opt.radius) && B.phase(i, j) > -K.delta) negative_phase = false;
    if (negative_phase) {
        throw PreconditionError("check_subharmonic_modified_slope: phase <= -delta; pass the bundle of -u");
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (grid.in_disk(i, j, opt.radius) && B.phase(i, j) < K.delta) {
                throw PreconditionError("check_subharmonic_modified_slope: phase " + std::to_string(B.phase(i, j)) +
                                        " < delta at (" + std::to_string(grid.coord(i)) + ", " +
                                        std::to_string(grid.coord(j)) + ")");
            }
        }
    }

    const ScalarField2 lap_b = laplace_beltrami(B.slope, B);
    const ScalarField2 lap_q = laplace_beltrami(half_square_radius(grid), B);

    // Smallest A making lap_b + A lap_q >= 0 on the region.
    double a_hat = 0.0;
    bool attainable = true;
    double lap_b_min = std::numeric_limits<double>::infinity();
    double trace_min = std::numeric_limits<double>::infinity();
    double drift_min = std::numeric_limits<double>::infinity();
    for (int j = 2; j < n - 2; ++j) {
        for (int i = 2; i < n - 2; ++i) {
            if (!grid.in_disk(i, j, opt.radius)) continue;
            lap_b_min = std::min(lap_b_min, lap_b(i, j));
            const double trace = B.inverse_metric.m11(i, j) + B.inverse_metric.m22(i, j);
            trace_min = std::min(trace_min, trace);
            drift_min = std::min(drift_min, lap_q(i, j) - trace);
            if (lap_b(i, j) < 0.0) {
                if (lap_q(i, j) > 0.0) {
                    a_hat = std::max(a_hat, -lap_b(i, j) / lap_q(i, j));
                } else {
                    attainable = false;
                }
            }
        }
    }
    const double A = opt.A.value_or(attainable ? a_hat : K.A);

    double min_lap = std::numeric_limits<double>::infinity();
    for (int j = 2; j < n - 2; ++j)
        for (int i = 2; i < n - 2; ++i)
            if (grid.in_disk(i, j, opt.radius)) min_lap = std::min(min_lap, lap_b(i, j) + A * lap_q(i, j));

    SlopeConstants with_a = K;
    with_a.A = A;
    const InequalityReport wmp = check_weak_max_principle(modified_slope(B, with_a), opt.trials, opt.seed, opt.radius);

    InequalityReport r = make_report("subharmonic", 0.0, min_lap, opt.slack);
    r.pass = r.pass && wmp.pass;
    r.constants = {{"A_hat", attainable ? a_hat : std::numeric_limits<double>::infinity()},
                   {"A", A},
                   {"min_lap", min_lap},
                   {"lap_b_min", lap_b_min},
                   {"trace_term_min", A * trace_min},
                   {"drift_term_min", A * drift_min},
                   {"wmp_margin", wmp.margin},
                   {"wmp_failures", wmp.constant("failures")}};
    if (!attainable) r.note = "no A >= 0 makes the modified slope subharmonic on the region";
    return r;
}

InequalityReport check_jacobi_integral(const GeometryBundle& B, const CutoffProfile& phi, const SlopeConstants& K) {
    K.validate();
    const Grid2& grid = B.grid();
    if (!(phi.phi.grid() == grid)) throw PreconditionError("check_jacobi_integral: grid mismatch");
    if (phi.outer_radius > grid.half_width()) {
        throw PreconditionError("check_jacobi_integral: cutoff support exceeds the grid");
    }
    JacobiOptions jopt;
    jopt.radius = phi.outer_radius;
    const InequalityReport pointwise = check_jacobi_pointwise(B, K, jopt);
    const double c_hat = pointwise.constant("C_hat");

    const ScalarField2 grad2_b = grad_g_norm2(B.slope, B);
    const ScalarField2 lap_b = laplace_beltrami(B.slope, B);
    const Vec2Field db = gradient_fd(B.slope);
    const auto& gi = B.inverse_metric;
    const std::size_t count = grid.size();

    ScalarField2 lhs_density(grid), cut_density(grid), const_density(grid);
    double ibp_left = 0.0, ibp_right = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double V = B.volume.values()[k];
        const double p = phi.phi.values()[k];
        const double p1 = phi.dphi.x1.values()[k], p2 = phi.dphi.x2.values()[k];
        const double g11 = gi.m11.values()[k], g12 = gi.m12.values()[k], g22 = gi.m22.values()[k];
        lhs_density.values()[k] = grad2_b.values()[k] * V;
        cut_density.values()[k] = (g11 * p1 * p1 + 2.0 * g12 * p1 * p2 + g22 * p2 * p2) * V;
        const_density.values()[k] = p * p * c_hat * V;
        const double b1 = db.x1.values()[k], b2 = db.x2.values()[k];
        ibp_left += p * p * lap_b.values()[k] * V;
        ibp_right -= 2.0 * p * (g11 * p1 * b1 + g12 * (p1 * b2 + p2 * b1) + g22 * p2 * b2) * V;
    }
    const double h = grid.spacing();
    ibp_left *= h * h;
    ibp_right *= h * h;
    const double ibp_residual = std::abs(ibp_left - ibp_right);
    const double ibp_tol = 10.0 * h;

    const double r1 = phi.inner_radius, r2 = phi.outer_radius;
    const double lhs = integrate_disk(lhs_density, r1);
    const double cut_term = 4.0 / (K.c * K.c) * integrate_disk(cut_density, r2);
    const double const_term = 2.0 / K.c * integrate_disk(const_density, r2);
    const double slack = kQuadratureSlackFactor * h *
                         (2.0 * kPi * r1 * sup_norm_disk(lhs_density, r1) +
                          2.0 * kPi * r2 * (4.0 / (K.c * K.c) * sup_norm_disk(cut_density, r2) +
                                            2.0 / K.c * sup_norm_disk(const_density, r2)));

    InequalityReport r = make_report("jacobi_integral", lhs, cut_term + const_term, slack);
    r.pass = r.pass && ibp_residual <= ibp_tol;
    r.excluded = pointwise.excluded;
    r.constants = {{"C_hat", c_hat},          {"cutoff_term", cut_term},   {"constant_term", const_term},
                   {"ibp_lhs", ibp_left},     {"ibp_rhs", ibp_right},      {"ibp_residual", ibp_residual},
                   {"ibp_tolerance", ibp_tol}};
    return r;
}

InequalityReport check_volume_bound(const ScalarField2& u, const GeometryBundle& B, Regime regime, double delta) {
    const Grid2& grid = B.grid();
    if (!(u.grid() == grid)) throw PreconditionError("check_volume_bound: grid mismatch");
    if (grid.half_width() < 4.0) throw PreconditionError("check_volume_bound: grid does not contain B4");
    if (!(delta > 0.0)) throw std::invalid_argument("check_volume_bound: delta must be positive");
    const int n = grid.nodes_per_axis();

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (!grid.in_disk(i, j, 4.0)) continue;
            const double p = B.phase(i, j);
            const bool ok = regime == Regime::Case1 ? (p >= delta - kRegimeFuzz && p <= kThreeQuarterPi + kRegimeFuzz)
                                                    : (p > kThreeQuarterPi);
            if (!ok) {
                throw PreconditionError(std::string("check_volume_bound: phase ") + std::to_string(p) +
                                        " does not belong to " + to_string(regime));
            }
        }
    }

    const ScalarField2 du = gradient_norm(u);
    const double h = grid.spacing();
    if (regime == Regime::Case1) {
        const double s = std::sin(delta);
        double worst = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (grid.in_disk(i, j, 4.0)) worst = std::max(worst, B.volume(i, j) - B.sigma1(i, j) / s);
        const double vol = integrate_disk(B.volume, 2.0);
        const double du3 = sup_norm_disk(du, 3.0);
        InequalityReport r = make_report("volume_bound", worst, 0.0, 0.0);
        r.constants = {{"integral_V_B2", vol},
                       {"du_sup_B3", du3},
                       {"C2_fitted", du3 > 0.0 ? s * vol / du3 : std::numeric_limits<double>::infinity()}};
        return r;
    }

    const double vol = integrate_disk(B.volume, 3.0);
    const ScalarField2 excess = map(B.sigma2, [](double s2) { return s2 - 1.0; });
    const double det_int = integrate_disk(excess, 3.0);
    const double du3 = sup_norm_disk(du, 3.0);
    const double du4 = sup_norm_disk(du, 4.0);
    const double sec_bound = std::sqrt(2.0);
    const double slack = kQuadratureSlackFactor * h * 2.0 * kPi * 3.0 * sup_norm_disk(B.volume, 3.0);
    InequalityReport r = make_report("volume_bound", vol, sec_bound * kPi * du3 * du3, slack);
    const double literal_rhs = sec_bound * du4 * du4;
    const double det_rhs = kPi * du3 * du3;
    const double det_slack = kQuadratureSlackFactor * h * 2.0 * kPi * 3.0 * sup_norm_disk(excess, 3.0);
    r.pass = r.pass && det_int <= det_rhs + det_slack;
    r.constants = {{"integral_V_B3", vol},
                   {"du_sup_B3", du3},
                   {"du_sup_B4", du4},
                   {"literal_rhs", literal_rhs},
                   {"literal_holds", vol <= literal_rhs ? 1.0 : 0.0},
                   {"integral_sigma2_minus_1_B3", det_int},
                   {"gradient_image_area_bound", det_rhs}};
    if (vol > literal_rhs) {
        r.note = "literal bound int_{B3} V <= sqrt2 ||Du||^2_{B4} fails; area factor pi restores it";
    }
    return r;
}

double fit_estimate_constant(double hessian_norm, double gradient_term) {
    if (!(hessian_norm >= 0.0) || !(gradient_term >= 0.0)) {
        throw std::invalid_argument("fit_estimate_constant: arguments must be non-negative");
    }
    if (hessian_norm == 0.0) return 0.0;
    const auto value = [&](double c) { return c * std::exp(c * gradient_term); };
    double lo = 0.0, hi = std::max(1.0, hessian_norm);
    while (value(hi) < hessian_norm) hi *= 2.0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) < hessian_norm ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

InequalityReport check_hessian_estimate(const ScalarField2& u_in, double R, std::optional<Regime> regime,
                                        double delta, double budget) {
    const Grid2& grid = u_in.grid();
    const int n = grid.nodes_per_axis();
    if (!(R > 0.0) || R > grid.half_width() * (1.0 + 1e-12)) {
        throw PreconditionError("check_hessian_estimate: R must lie in (0, L]");
    }
    if (n % 2 == 0) throw PreconditionError("check_hessian_estimate: the origin must be a grid node (odd n)");

    // canonicalise to positive phase
    GeometryBundle B = bundle(u_in);
    double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (!grid.in_disk(i, j, R)) continue;
            pmin = std::min(pmin, B.phase(i, j));
            pmax = std::max(pmax, B.phase(i, j));
        }
    }
    bool flipped = false;
    ScalarField2 u = u_in;
    if (pmax <= -delta) {
        u = map(u_in, [](double v) { return -v; });
        B = bundle(u);
        std::tie(pmin, pmax) = std::pair{-pmax, -pmin};
        flipped = true;
    }
    if (pmin < delta - kRegimeFuzz) {
        throw PreconditionError("check_hessian_estimate: phase " + std::to_string(pmin) +
                                " on B_R is below delta (not a supercritical solution)");
    }
    const bool case1 = pmax <= kThreeQuarterPi + kRegimeFuzz;
    const bool case2 = pmin > kThreeQuarterPi;
    Regime used;
    if (regime) {
        if ((*regime == Regime::Case1 && !case1) || (*regime == Regime::Case2 && !case2)) {
            throw PreconditionError(std::string("check_hessian_estimate: phase range [") + std::to_string(pmin) +
                                    ", " + std::to_string(pmax) + "] does not match " + to_string(*regime));
        }
        used = *regime;
    } else if (case1) {
        used = Regime::Case1;
    } else if (case2) {
        used = Regime::Case2;
    } else {
        throw PreconditionError("check_hessian_estimate: phase range straddles 3pi/4");
    }

    const int mid = (n - 1) / 2;
    const double hess_norm = std::max(std::abs(B.lambda1(mid, mid)), std::abs(B.lambda2(mid, mid)));
    const double grad_sup = sup_norm_disk(gradient_norm(u), R);
    const double G = used == Regime::Case1 ? grad_sup / R : (grad_sup / R) * (grad_sup / R);
    const double c_star = fit_estimate_constant(hess_norm, G);

    InequalityReport r = make_report("hessian_estimate", c_star, budget, 0.0);
    r.constants = {{"L", hess_norm},
                   {"G", G},
                   {"C_star", c_star},
                   {"budget", budget},
                   {"regime", used == Regime::Case1 ? 1.0 : 2.0},
                   {"phase_min", pmin},
                   {"phase_max", pmax}};
    if (flipped) r.note = "negative phase handled through u -> -u";
    return r;
}

}  // namespace lmce
