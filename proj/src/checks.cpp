#include "fieldroad/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fieldroad/cone.hpp"
#include "fieldroad/core.hpp"
#include "fieldroad/errors.hpp"
#include "fieldroad/geometry.hpp"
#include "fieldroad/hjsolver.hpp"
#include "fieldroad/kppsim.hpp"
#include "fieldroad/paths.hpp"

namespace fieldroad {

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::mt19937_64 make_rng(const CheckOptions& opt, int id) {
    return std::mt19937_64(opt.seed * 1000003ULL + static_cast<std::uint64_t>(id));
}

struct Instance {
    Params params;
    SpaceTimePoint point;
};

Instance random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(0.0, 5.0);
    std::uniform_real_distribution<double> ux(-20.0, 20.0);
    std::uniform_real_distribution<double> uy(0.0, 20.0);
    std::uniform_real_distribution<double> ut(0.1, 5.0);
    auto positive = [&] {
        double v = 0.0;
        while (v == 0.0) v = coef(rng);
        return v;
    };
    Instance k;
    k.params.a = positive();
    k.params.b = positive();
    k.params.c = positive();
    k.point = {ux(rng), uy(rng), ut(rng)};
    return k;
}

Params random_admissible(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(0.2, 5.0);
    return {coef(rng), coef(rng), coef(rng)};
}

// f(s1) - f(s2) factored through (s1 - s2) so that comparisons close to the
// minimum keep their sign.
double objective_difference(const Params& k, const SpaceTimePoint& p, double s1, double s2) {
    const double d = s1 - s2;
    const double u2 = -p.x + k.b * s2 + k.c * p.t;
    const double w2 = p.t + k.a * s2;
    const double w1 = p.t + k.a * s1;
    const double first = (2.0 * k.b * u2 * w2 + k.b * k.b * d * w2 - k.a * u2 * u2) / (4.0 * w1 * w2);
    const double second = (2.0 * p.y + s1 + s2) / (4.0 * p.t);
    return d * (first + second);
}

// Golden-section scan, independent of the library's root finders.
double golden_section_argmin(const Params& k, const SpaceTimePoint& p) {
    double hi = 1.0;
    while (objective_difference(k, p, hi, 0.5 * hi) < 0.0) hi *= 2.0;
    double lo = 0.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = hi - g * (hi - lo);
    double m2 = lo + g * (hi - lo);
    for (int i = 0; i < 300 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
        if (objective_difference(k, p, m1, m2) < 0.0) {
            hi = m2;
            m2 = m1;
            m1 = hi - g * (hi - lo);
        } else {
            lo = m1;
            m1 = m2;
            m2 = lo + g * (hi - lo);
        }
    }
    return 0.5 * (lo + hi);
}

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

Outcome minimizer_agreement(const CheckOptions& opt) {
    auto rng = make_rng(opt, 1);
    const int n = opt.quick ? 1000 : 10000;
    const auto start = Clock::now();
    double worst = 0.0;
    int road = 0;
    for (int i = 0; i < n; ++i) {
        const auto k = random_instance(rng);
        const auto e = solve_minimizer(k.params, k.point);
        const double scale = 1.0 + e.s_star;
        worst = std::max(worst, std::abs(golden_section_argmin(k.params, k.point) - e.s_star) / scale);
        if (e.regime == Regime::RoadAssisted) {
            ++road;
            worst = std::max(worst, std::abs(minimizer_via_cubic(k.params, k.point) - e.s_star) / scale);
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << n << " instances (" << road << " road-assisted); max |ds|/(1+s*) = " << sci(worst) << "; "
      << sci(elapsed) << " s";
    return {worst <= 1e-8 && elapsed < 10.0, d.str()};
}

Outcome regime_trichotomy(const CheckOptions& opt) {
    auto rng = make_rng(opt, 2);
    const int n = opt.quick ? 1000 : 10000;
    int agree = 0;
    int tied = 0;
    for (int i = 0; i < n; ++i) {
        const auto k = random_instance(rng);
        const double gap = k.point.y - critical_boundary_y(k.params, k.point.x, k.point.t);
        if (std::abs(gap) <= tolerance::classify) {
            ++tied;
            continue;
        }
        const bool curve = gap >= 0.0;
        const bool slope = objective_derivatives(k.params, k.point, 0.0).f_s >= 0.0;
        const bool constant = cubic_coefficients(k.params, k.point).c0 >= 0.0;
        const bool zero = solve_minimizer(k.params, k.point).s_star == 0.0;
        if (curve == slope && curve == constant && curve == zero) ++agree;
    }
    std::ostringstream d;
    d << agree << "/" << (n - tied) << " agree; " << tied << " within tol_classify of the curve";
    return {agree == n - tied, d.str()};
}

Outcome homogeneity(const CheckOptions& opt) {
    auto rng = make_rng(opt, 3);
    const int n = opt.quick ? 200 : 1000;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        auto k = random_instance(rng);
        k.point.t = 1.0;
        const double phi = solve_minimizer(k.params, k.point).phi_star;
        for (double lambda : {0.5, 2.0, 10.0}) {
            const auto r = homogeneity_check(k.params, k.point, lambda);
            worst = std::max(worst, r.phi / (lambda * (1.0 + std::abs(phi))));
        }
    }
    std::ostringstream d;
    d << n << " instances x 3 scales; max residual / (lambda (1+|phi*|)) = " << sci(worst);
    return {worst <= 1e-9, d.str()};
}

Outcome c1_across_curve(const CheckOptions& opt) {
    auto rng = make_rng(opt, 4);
    std::uniform_real_distribution<double> coef(0.5, 4.0);
    std::uniform_real_distribution<double> offset(0.5, 6.0);
    const int n = opt.quick ? 10 : 50;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const Params params{coef(rng), coef(rng), coef(rng)};
        const double t = 1.0;
        const double x = params.c * t + offset(rng);
        const double yc = critical_boundary_y(params, x, t);
        auto phi = [&](double px, double py) { return solve_minimizer(params, {px, py, t}).phi_star; };
        auto mismatch = [&](double h) {
            const double above_y = (phi(x, yc + h) - phi(x, yc)) / h;
            const double below_y = (phi(x, yc) - phi(x, yc - h)) / h;
            const double above_x = (phi(x + h, yc + h) - phi(x - h, yc + h)) / (2.0 * h);
            const double below_x = (phi(x + h, yc - h) - phi(x - h, yc - h)) / (2.0 * h);
            return std::hypot(above_y - below_y, above_x - below_x);
        };
        min_ratio = std::min(min_ratio, mismatch(1e-3) / mismatch(5e-4));
    }
    std::ostringstream d;
    d << n << " curve points; min mismatch ratio h -> h/2 = " << sci(min_ratio);
    return {min_ratio >= 1.8, d.str()};
}

Outcome payoff_identity(const CheckOptions& opt) {
    auto rng = make_rng(opt, 5);
    const int n = opt.quick ? 200 : 1000;
    double worst = 0.0;
    int road = 0;
    for (int i = 0; i < n; ++i) {
        const auto k = random_instance(rng);
        const auto plan = build_optimal_plan(k.params, k.point);
        if (plan.regime == Regime::RoadAssisted) ++road;
        const auto e = solve_minimizer(k.params, k.point);
        const double payoff = path_payoff(k.params, plan, k.point).value;
        worst = std::max(worst, std::abs(payoff - e.J) / (1.0 + std::abs(e.phi_star)));
    }
    std::ostringstream d;
    d << n << " instances (" << road << " road-assisted); max |payoff - J| / (1+|phi*|) = " << sci(worst);
    return {worst <= 1e-10 && road > 0 && road < n, d.str()};
}

Outcome freidlin(const CheckOptions& opt) {
    auto rng = make_rng(opt, 6);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    const int n = opt.quick ? 20 : 100;
    int passed = 0;
    int road = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    double eq = 0.0;
    double surplus = 0.0;
    for (int i = 0; i < n; ++i) {
        const Params params = random_admissible(rng);
        const auto p = locate_front_point(params, angle(rng), 1.0);
        const auto r = freidlin_check(params, p, 64);
        if (r.regime == Regime::RoadAssisted) ++road;
        if (r.passed && r.min_margin >= -1e-9) ++passed;
        min_margin = std::min(min_margin, r.min_margin);
        eq = std::max(eq, r.equality_error);
        surplus = std::max(surplus, r.surplus_error);
    }
    std::ostringstream d;
    d << passed << "/" << n << " front points (" << road << " road-assisted); min margin " << sci(min_margin)
      << "; equality err " << sci(eq) << "; surplus err " << sci(surplus);
    return {passed == n, d.str()};
}

GridSpec figure_grid(bool quick) {
    GridSpec g;
    if (quick) {
        g.nx = 300;
        g.ny = 120;
    }
    return g;
}

Outcome convexity(const CheckOptions& opt) {
    auto rng = make_rng(opt, 7);
    const int n = opt.quick ? 3 : 20;
    const auto grid = figure_grid(opt.quick);
    const auto start = Clock::now();
    int exact_pass = 0;
    int linear_fail = 0;
    for (int k = 0; k < n; ++k) {
        const Params p = random_admissible(rng);
        const auto field = eval_field(p, grid, 1.0);
        auto all_pass = [](const std::vector<ContourPolyline>& polys) {
            if (polys.empty()) return false;
            return std::all_of(polys.begin(), polys.end(),
                               [](const ContourPolyline& c) { return convexity_audit(c).passed; });
        };
        if (all_pass(extract_phi_contour(p, field, 1.0, 1.0, EdgePlacement::ExactRoot))) ++exact_pass;
        if (!all_pass(extract_phi_contour(p, field, 1.0, 1.0, EdgePlacement::Linear))) ++linear_fail;
    }
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << exact_pass << "/" << n << " exact-root contours convex on " << grid.nx << "x" << grid.ny
      << "; linear interpolation fails " << linear_fail << "/" << n << "; " << sci(elapsed) << " s";
    return {exact_pass == n && elapsed < 60.0, d.str()};
}

Outcome rotational(const CheckOptions& opt) {
    auto rng = make_rng(opt, 8);
    std::uniform_real_distribution<double> rr(0.0, 20.0);
    std::uniform_real_distribution<double> tt(0.1, 5.0);
    const int triples = opt.quick ? 3 : 20;
    double worst = 0.0;
    int profiles = 0;
    for (int k = 0; k < triples; ++k) {
        const Params p = random_admissible(rng);
        for (int m = 0; m < 50; ++m) {
            worst = std::max(worst, rotational_profile(p, rr(rng), tt(rng), 64).max_violation);
            ++profiles;
        }
    }
    std::ostringstream d;
    d << profiles << " profiles over " << triples << " triples; max violation " << sci(worst);
    return {worst <= 1e-10, d.str()};
}

std::string sweep_csv(const std::vector<SweepEntry>& entries, const std::string& name) {
    CsvTable table = contour_table(name, entries.front().value, entries.front().contours);
    for (std::size_t k = 1; k < entries.size(); ++k) append_contours(table, name, entries[k].value, entries[k].contours);
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

Outcome figure2(const CheckOptions& opt) {
    const auto grid = figure_grid(opt.quick);
    std::vector<double> values;
    for (int v = 1; v <= 10; ++v) values.push_back(v);
    PartialParams left;
    left.a = 2.0;
    left.b = 2.0;
    PartialParams right;
    right.a = 2.0;
    right.c = 2.0;
    const auto by_c = sweep_figure2(left, "c", values, grid);
    const auto by_b = sweep_figure2(right, "b", values, grid);
    bool x_increasing = true;
    bool road_increasing = true;
    bool inside = true;
    for (std::size_t k = 1; k < values.size(); ++k) {
        x_increasing = x_increasing && by_c[k].x_max > by_c[k - 1].x_max;
        road_increasing = road_increasing && by_b[k].road_extent > by_b[k - 1].road_extent;
    }
    for (const auto* sweep : {&by_c, &by_b}) {
        for (const auto& e : *sweep) inside = inside && !e.touches_window;
    }
    const bool identical = sweep_csv(by_c, "c") == sweep_csv(sweep_figure2(left, "c", values, grid), "c") &&
                           sweep_csv(by_b, "b") == sweep_csv(sweep_figure2(right, "b", values, grid), "b");
    std::ostringstream d;
    d << "x_max " << sci(by_c.front().x_max) << " -> " << sci(by_c.back().x_max)
      << (x_increasing ? " increasing" : " NOT increasing") << "; road extent " << sci(by_b.front().road_extent)
      << " -> " << sci(by_b.back().road_extent) << (road_increasing ? " increasing" : " NOT increasing")
      << "; csv " << (identical ? "byte-identical" : "DIFFERS") << "; window "
      << (inside ? "contains all contours" : "clips a contour");
    return {x_increasing && road_increasing && identical && inside, d.str()};
}

Outcome hj_oracle(const CheckOptions& opt) {
    const Params params{2.0, 2.0, 2.0};
    const std::vector<std::pair<std::size_t, std::size_t>> levels =
        opt.quick ? std::vector<std::pair<std::size_t, std::size_t>>{{36, 19}, {71, 36}, {141, 71}}
                  : std::vector<std::pair<std::size_t, std::size_t>>{{141, 71}, {281, 141}, {561, 281}};
    std::vector<double> errors;
    double slowest = 0.0;
    std::ostringstream d;
    for (const auto& [nx, ny] : levels) {
        SolverConfig cfg;
        cfg.spec = {-4.0, 10.0, 0.0, 5.0, nx, ny};
        const auto run = solve(cfg, params);
        const auto rep = compare_to_closed_form(run, params, 1.0, cfg.spec);
        errors.push_back(rep.linf);
        slowest = std::max(slowest, run.wall_seconds);
        d << nx << "x" << ny << " Linf " << sci(rep.linf) << " (" << sci(run.wall_seconds) << " s); ";
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
    d << (decreasing ? "decreasing" : "NOT decreasing");
    return {decreasing && slowest < 120.0, d.str()};
}

Outcome eps_convergence(const CheckOptions& opt) {
    const Params params{2.0, 2.0, 2.0};
    EpsRunConfig base;
    if (opt.quick) base.spec = {-4.0, 10.0, 0.0, 5.0, 71, 26};
    const auto start = Clock::now();
    const auto gaps = eps_trend(params, base, {0.4, 0.2, 0.1});
    const double elapsed = seconds_since(start);
    bool decreasing = true;
    std::ostringstream d;
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        if (k > 0) decreasing = decreasing && gaps[k].sup < gaps[k - 1].sup;
        d << "eps " << gaps[k].eps << " gap " << sci(gaps[k].sup) << "; ";
    }
    d << "collar " << sci(gaps.front().collar) << "; " << sci(elapsed) << " s";
    return {decreasing && elapsed < 600.0, d.str()};
}

Outcome strip_limit(const CheckOptions& opt) {
    std::vector<StripReport> reports;
    for (double delta : {0.2, 0.1, 0.05}) {
        StripConfig cfg;
        cfg.delta = delta;
        if (opt.quick) cfg.spec = {-15.0, 15.0, 0.0, 5.0, 61, 25};
        reports.push_back(solve_thin_strip(cfg));
    }
    bool decreasing = true;
    bool balanced = true;
    std::ostringstream d;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        if (k > 0) decreasing = decreasing && r.residual < reports[k - 1].residual;
        balanced = balanced && std::abs(r.mass_change - r.reaction_integral) <= 1e-10 * r.reaction_integral;
        d << "delta " << r.delta << " R " << sci(r.residual) << "; ";
    }
    d << (decreasing ? "decreasing" : "NOT decreasing") << "; mass balance "
      << (balanced ? "ok" : "VIOLATED");
    return {decreasing && balanced, d.str()};
}

Outcome cone_module(const CheckOptions& opt) {
    auto rng = make_rng(opt, 13);
    std::uniform_real_distribution<double> coord(-50.0, 50.0);
    std::uniform_real_distribution<double> ang(1e-3, std::numbers::pi / 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = opt.quick ? 500 : 5000;
    double psi_err = 0.0;
    for (int k = 0; k < n; ++k) {
        ConeConfig cfg;
        cfg.alpha = ang(rng);
        const std::array<double, 2> p{coord(rng), coord(rng)};
        const double scale = 1.0 + std::hypot(p[0], p[1]);
        const auto once = psi_alpha(cfg, p);
        const auto twice = psi_alpha(cfg, once);
        psi_err = std::max({psi_err, std::abs(twice[0] - p[0]) / scale, std::abs(twice[1] - p[1]) / scale,
                            std::abs(std::hypot(once[0], once[1]) - std::hypot(p[0], p[1])) / scale});
    }

    // J_alpha along an increasing ladder of a-tilde on a polar grid of the cone.
    const std::vector<double> ladder{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    const int configs = opt.quick ? 4 : 20;
    double mono = 0.0;
    int samples = 0;
    for (int k = 0; k < configs; ++k) {
        ConeConfig cfg;
        cfg.alpha = 0.05 + (std::numbers::pi / 2 - 0.05) * unit(rng);
        cfg.road0 = {0.2 + 4.0 * unit(rng), 4.0 * unit(rng)};
        cfg.road_alpha.b = 4.0 * unit(rng);
        for (int ir = 0; ir <= 8; ++ir) {
            for (int ia = 0; ia <= 8; ++ia) {
                const double r = 1.25 * ir;
                const double th = 2.0 * cfg.alpha * ia / 8.0;
                const SpaceTimePoint p{r * std::cos(th), std::max(0.0, r * std::sin(th)), 1.0};
                double previous = std::numeric_limits<double>::infinity();
                for (double a : ladder) {
                    cfg.road_alpha.a = a;
                    const double j = payoff_J_alpha(cfg, p);
                    if (std::isfinite(previous)) mono = std::max(mono, (j - previous) / (1.0 + std::abs(previous)));
                    previous = j;
                    ++samples;
                }
            }
        }
    }

    ConeConfig sym;
    sym.road0 = {2.0, 2.0};
    sym.road_alpha = {2.0, 2.0};
    const auto rep = theorem5_condition(sym, 10.0, 101);
    std::ostringstream d;
    d << "psi involution/isometry err " << sci(psi_err) << "; J_alpha max increase in a-tilde " << sci(mono)
      << " over " << samples << " samples; symmetric condition " << (rep.passed ? "passes" : "FAILS")
      << " with max gap " << sci(rep.max_abs_gap);
    return {psi_err <= 1e-14 && mono <= 1e-12 && rep.passed && rep.max_abs_gap <= 1e-14, d.str()};
}

struct Entry {
    int id;
    const char* name;
    Outcome (*run)(const CheckOptions&);
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {1, "minimizer-agreement", minimizer_agreement},
        {2, "regime-trichotomy", regime_trichotomy},
        {3, "homogeneity", homogeneity},
        {4, "c1-across-curve", c1_across_curve},
        {5, "path-payoff-identity", payoff_identity},
        {6, "freidlin-condition", freidlin},
        {7, "strict-convexity", convexity},
        {8, "rotational-monotonicity", rotational},
        {9, "contour-sweep", figure2},
        {10, "hj-oracle", hj_oracle},
        {11, "eps-convergence", eps_convergence},
        {12, "thin-strip-limit", strip_limit},
        {13, "cone-module", cone_module},
    };
    return entries;
}

}  // namespace

std::vector<int> all_check_ids() {
    std::vector<int> ids;
    for (const auto& e : registry()) ids.push_back(e.id);
    return ids;
}

CheckResult run_check(int id, const CheckOptions& options) {
    const auto& entries = registry();
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.id == id; });
    if (it == entries.end()) throw ConfigError("unknown check id " + std::to_string(id));
    CheckResult result;
    result.id = id;
    result.name = it->name;
    const auto start = Clock::now();
    try {
        const auto outcome = it->run(options);
        result.passed = outcome.passed;
        result.detail = outcome.detail;
    } catch (const Error& e) {
        result.passed = false;
        result.detail = std::string(e.kind()) + ": " + e.what();
    }
    result.seconds = seconds_since(start);
    return result;
}

std::string format_check_line(const CheckResult& r) {
    std::ostringstream s;
    s.precision(3);
    s << "criterion " << r.id << " " << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " (" << r.seconds
      << " s) " << r.detail;
    return s.str();
}

}  // namespace fieldroad
