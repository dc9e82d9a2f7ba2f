#include "fieldroad/hjsolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

#include "fieldroad/errors.hpp"
#include "fieldroad/parallel.hpp"

namespace fieldroad {

namespace {

struct Slopes {
    std::array<double, 2> minus{};
    std::array<double, 2> plus{};
    double ghost_gain = 0.0;  // |d p2_minus / d p1| on the road row, 0 elsewhere
};

// Convex upwind choice for g(q) = a q^2 + b q, minimized at q = -b / 2a:
// the backward slope when g is increasing there, the forward one when
// decreasing, the minimum when the two disagree.
struct RoadSlope {
    double value;
    double gain;
};

RoadSlope road_slope(const Params& params, double q_minus, double q_plus) {
    const double a = params.a;
    const double b = params.b;
    const double m = -b / (2.0 * a);
    auto g = [&](double q) { return a * q * q + b * q; };
    const double from_left = std::max(q_minus, m);
    const double from_right = std::min(q_plus, m);
    const double gl = g(from_left);
    const double gr = g(from_right);
    if (gl >= gr) return {gl, std::abs(2.0 * a * from_left + b)};
    return {gr, std::abs(2.0 * a * from_right + b)};
}

bool wentzell_row(const GridSpec& g) { return g.y_min == 0.0; }

Slopes slopes_at(const ScalarField& f, const Params& params, std::size_t i, std::size_t j) {
    const auto& g = f.spec;
    const double dx = g.dx();
    const double dy = g.dy();
    const double v = f.at(i, j);
    Slopes s;
    s.minus[0] = i > 0 ? (v - f.at(i - 1, j)) / dx : 0.0;
    s.plus[0] = i + 1 < g.nx ? (f.at(i + 1, j) - v) / dx : 0.0;
    s.plus[1] = j + 1 < g.ny ? (f.at(i, j + 1) - v) / dy : 0.0;
    if (j > 0) {
        s.minus[1] = (v - f.at(i, j - 1)) / dy;
    } else if (wentzell_row(g)) {
        const auto r = road_slope(params, s.minus[0], s.plus[0]);
        s.minus[1] = r.value;
        s.ghost_gain = r.gain;
    }
    return s;
}

double h1(double p, double c) { return p * p + c * p; }

StepBounds bounds_of(const ScalarField& state, const SolverConfig& config, const Params& params) {
    const auto& g = state.spec;
    const double c = params.c;
    StepBounds b;
    std::mutex merge;
    parallel_for(g.ny, [&](std::size_t j) {
        double a1 = 0.0;
        double a2 = 0.0;
        double grad = 0.0;
        double gain = 0.0;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const auto s = slopes_at(state, params, i, j);
            a1 = std::max({a1, std::abs(2.0 * s.minus[0] + c), std::abs(2.0 * s.plus[0] + c)});
            a2 = std::max({a2, std::abs(2.0 * s.minus[1]), std::abs(2.0 * s.plus[1])});
            grad = std::max({grad, std::abs(s.minus[0]), std::abs(s.plus[0]), std::abs(s.minus[1]),
                             std::abs(s.plus[1])});
            gain = std::max(gain, s.ghost_gain);
        }
        std::lock_guard lock(merge);
        b.viscosity[0] = std::max(b.viscosity[0], a1);
        b.viscosity[1] = std::max(b.viscosity[1], a2);
        b.max_gradient = std::max(b.max_gradient, grad);
        b.rate = std::max(b.rate, gain);  // temporarily the ghost gain
    });
    const double dx = g.dx();
    const double dy = g.dy();
    const double gain = b.rate;
    // Center coefficient of the update: x and y stencils, plus the road row's
    // dependence on its x-neighbours through the ghost slope.
    b.rate = b.viscosity[0] / dx + b.viscosity[1] / dy + b.viscosity[1] * gain / dx;
    const double cfl_rate = b.rate > 0.0 ? config.cfl / b.rate : std::numeric_limits<double>::infinity();
    const double speed = 2.0 * b.max_gradient + std::abs(c);
    const double cfl_grad =
        speed > 0.0 ? config.cfl * std::min(dx, dy) / speed : std::numeric_limits<double>::infinity();
    b.dt_max = std::min(cfl_rate, cfl_grad);
    return b;
}

ScalarField advance(const ScalarField& state, const SolverConfig& config, const Params& params,
                    double dt, const StepBounds& bounds) {
    const auto& g = state.spec;
    ScalarField next(g, state.quantity);
    parallel_for(g.ny, [&](std::size_t j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const auto s = slopes_at(state, params, i, j);
            const double h = numerical_hamiltonian(config.scheme, s.minus, s.plus, params, bounds.viscosity);
            next.at(i, j) = std::max(0.0, state.at(i, j) - dt * h);
        }
    });
    for (double v : next.values) {
        if (!std::isfinite(v)) throw StabilityError("non-finite value in HJ iterate");
    }
    return next;
}

}  // namespace

std::string to_string(Scheme scheme) {
    return scheme == Scheme::LaxFriedrichs ? "lax_friedrichs" : "godunov";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "lax_friedrichs" || name == "lf") return Scheme::LaxFriedrichs;
    if (name == "godunov") return Scheme::Godunov;
    throw ConfigError("unknown scheme '" + name + "' (expected lax_friedrichs or godunov)");
}

void validate(const SolverConfig& config) {
    validate(config.spec);
    if (!(config.cfl > 0.0 && config.cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
    if (!(config.t_end > 0.0) || !std::isfinite(config.t_end)) throw ConfigError("t_end must be > 0");
    if (!(config.k_init > 0.0) || !std::isfinite(config.k_init)) {
        throw ConfigError("k_init must be > 0");
    }
}

ScalarField initial_data(const GridSpec& spec, double k) {
    validate(spec);
    if (!(k > 0.0)) throw ConfigError("initial steepness k must be > 0");
    if (spec.x_min > 0.0 || spec.x_max < 0.0 || spec.y_min > 0.0) {
        throw ConfigError("origin lies outside the window");
    }
    const double fi = -spec.x_min / spec.dx();
    if (std::abs(fi - std::round(fi)) > 1e-9) throw ConfigError("origin is not a grid node");
    ScalarField f(spec, Quantity::PdeIterate);
    const auto i0 = static_cast<std::size_t>(std::llround(fi));
    for (std::size_t j = 0; j < spec.ny; ++j) {
        for (std::size_t i = 0; i < spec.nx; ++i) {
            const double r = (i == i0 && j == 0) ? 0.0 : std::hypot(spec.x(i), spec.y(j));
            f.at(i, j) = k * std::min(1.0, r);
        }
    }
    return f;
}

double numerical_hamiltonian(Scheme scheme, const std::array<double, 2>& p_minus,
                             const std::array<double, 2>& p_plus, const Params& params,
                             const std::array<double, 2>& artificial_viscosity) {
    const double c = params.c;
    if (scheme == Scheme::Godunov) {
        const double m = -0.5 * c;
        const double x_part = std::max(h1(std::max(p_minus[0], m), c), h1(std::min(p_plus[0], m), c));
        const double lo = std::max(p_minus[1], 0.0);
        const double hi = std::min(p_plus[1], 0.0);
        return x_part + std::max(lo * lo, hi * hi) + 1.0;
    }
    const double need_x = std::max(std::abs(2.0 * p_minus[0] + c), std::abs(2.0 * p_plus[0] + c));
    const double need_y = std::max(std::abs(2.0 * p_minus[1]), std::abs(2.0 * p_plus[1]));
    const double slack = 1.0 + 1e-12;
    if (artificial_viscosity[0] * slack < need_x || artificial_viscosity[1] * slack < need_y) {
        throw StabilityError("Lax-Friedrichs viscosity below the local bound on |dH/dp|");
    }
    const double q1 = 0.5 * (p_minus[0] + p_plus[0]);
    const double q2 = 0.5 * (p_minus[1] + p_plus[1]);
    return q1 * q1 + c * q1 + q2 * q2 + 1.0 -
           0.5 * artificial_viscosity[0] * (p_plus[0] - p_minus[0]) -
           0.5 * artificial_viscosity[1] * (p_plus[1] - p_minus[1]);
}

StepBounds stability_bounds(const ScalarField& state, const SolverConfig& config,
                            const Params& params) {
    validate(config);
    validate(params);
    if (state.values.size() != state.spec.size()) throw DomainError("field size does not match its grid");
    return bounds_of(state, config, params);
}

ScalarField step(const ScalarField& state, const SolverConfig& config, const Params& params,
                 double dt) {
    const auto bounds = stability_bounds(state, config, params);
    if (!(dt > 0.0)) throw StabilityError("time step must be > 0");
    if (dt > bounds.dt_max * (1.0 + 1e-12)) {
        throw StabilityError("time step " + std::to_string(dt) + " exceeds the CFL bound " +
                             std::to_string(bounds.dt_max));
    }
    return advance(state, config, params, dt, bounds);
}

SolveResult solve(const SolverConfig& config, const Params& params) {
    validate(config);
    validate(params);
    const auto start = std::chrono::steady_clock::now();
    SolveResult out;
    out.field = initial_data(config.spec, config.k_init);
    out.dt_min = std::numeric_limits<double>::infinity();
    double t = 0.0;
    while (t < config.t_end) {
        const auto bounds = bounds_of(out.field, config, params);
        double dt = std::min(bounds.dt_max, config.t_end - t);
        if (!(dt > 0.0)) throw StabilityError("time step collapsed to zero");
        // Avoid a sliver of a final step.
        if (config.t_end - (t + dt) < 1e-12 * config.t_end) dt = config.t_end - t;
        out.field = advance(out.field, config, params, dt, bounds);
        t = (dt == config.t_end - t) ? config.t_end : t + dt;
        ++out.steps;
        out.dt_min = std::min(out.dt_min, dt);
        out.dt_max = std::max(out.dt_max, dt);
    }
    out.t_final = t;
    out.active_nodes = static_cast<std::size_t>(
        std::count(out.field.values.begin(), out.field.values.end(), 0.0));
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ErrorReport compare_to_closed_form(const ScalarField& solved, const Params& params, double t,
                                   const GridSpec& window, std::size_t collar) {
    const auto& g = solved.spec;
    if (!(window == g)) throw ConfigError("comparison window does not match the solved grid");
    if (solved.values.size() != g.size()) throw DomainError("field size does not match its grid");
    const std::size_t j_lo = wentzell_row(g) ? 0 : collar;
    if (2 * collar >= g.nx || j_lo + collar >= g.ny) throw ConfigError("collar leaves no interior nodes");

    ErrorReport rep;
    rep.collar = collar;
    for (std::size_t j = j_lo; j + collar < g.ny; ++j) {
        for (std::size_t i = collar; i + collar < g.nx; ++i) {
            const double exact = solve_minimizer(params, {g.x(i), g.y(j), t}).v;
            const double e = std::abs(solved.at(i, j) - exact);
            rep.l1 += e;
            ++rep.n_compared;
            if (e > rep.linf) {
                rep.linf = e;
                rep.x_at_linf = g.x(i);
                rep.y_at_linf = g.y(j);
            }
        }
    }
    rep.l1 *= g.dx() * g.dy();
    return rep;
}

ErrorReport compare_to_closed_form(const SolveResult& solved, const Params& params, double t,
                                   const GridSpec& window, std::size_t collar) {
    if (t != solved.t_final) throw DomainError("comparison time differs from the solve's final time");
    return compare_to_closed_form(solved.field, params, t, window, collar);
}

}  // namespace fieldroad
