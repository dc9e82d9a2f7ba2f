#include "fieldroad/kppsim.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

#include "fieldroad/errors.hpp"
#include "fieldroad/hjsolver.hpp"
#include "fieldroad/parallel.hpp"

namespace fieldroad {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------- phase ---

struct RoadGhost {
    double slope;  // p2_minus = g(v_x) - a eps v_xx
    double gain;   // |g'| at the upwind slope
};

RoadGhost road_ghost(const Params& params, double eps, double q_minus, double q_plus, double vxx) {
    const double a = params.a;
    const double b = params.b;
    const double m = -b / (2.0 * a);
    auto g = [&](double q) { return a * q * q + b * q; };
    const double left = std::max(q_minus, m);
    const double right = std::min(q_plus, m);
    const double gl = g(left);
    const double gr = g(right);
    const bool use_left = gl >= gr;
    return {(use_left ? gl : gr) - a * eps * vxx, std::abs(2.0 * a * (use_left ? left : right) + b)};
}

struct PhaseStencil {
    std::array<double, 2> minus{};
    std::array<double, 2> plus{};
    double laplacian = 0.0;
    double gain = 0.0;
};

PhaseStencil phase_stencil(const ScalarField& f, const Params& params, double eps, std::size_t i,
                           std::size_t j) {
    const auto& g = f.spec;
    const double dx = g.dx();
    const double dy = g.dy();
    const double v = f.at(i, j);
    const double vl = i > 0 ? f.at(i - 1, j) : v;
    const double vr = i + 1 < g.nx ? f.at(i + 1, j) : v;
    const double vu = j + 1 < g.ny ? f.at(i, j + 1) : v;
    PhaseStencil s;
    s.minus[0] = (v - vl) / dx;
    s.plus[0] = (vr - v) / dx;
    s.plus[1] = (vu - v) / dy;
    const double vxx = (vr - 2.0 * v + vl) / (dx * dx);
    if (j > 0) {
        const double vd = f.at(i, j - 1);
        s.minus[1] = (v - vd) / dy;
        s.laplacian = vxx + (vu - 2.0 * v + vd) / (dy * dy);
    } else {
        const auto ghost = road_ghost(params, eps, s.minus[0], s.plus[0], vxx);
        s.minus[1] = ghost.slope;
        s.gain = ghost.gain;
        s.laplacian = vxx + (vu - v) / (dy * dy) - ghost.slope / dy;
    }
    return s;
}

double phase_rate(const ScalarField& f, const Params& params, double eps) {
    const auto& g = f.spec;
    const double dx = g.dx();
    const double dy = g.dy();
    const double c = params.c;
    double a1 = 0.0;
    double a2 = 0.0;
    double gain = 0.0;
    std::mutex merge;
    parallel_for(g.ny, [&](std::size_t j) {
        double r1 = 0.0;
        double r2 = 0.0;
        double rg = 0.0;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const auto s = phase_stencil(f, params, eps, i, j);
            r1 = std::max({r1, std::abs(2.0 * s.minus[0] + c), std::abs(2.0 * s.plus[0] + c)});
            r2 = std::max({r2, std::abs(2.0 * s.minus[1]), std::abs(2.0 * s.plus[1])});
            rg = std::max(rg, s.gain);
        }
        std::lock_guard lock(merge);
        a1 = std::max(a1, r1);
        a2 = std::max(a2, r2);
        gain = std::max(gain, rg);
    });
    // Center coefficient: diffusion, transport, the source's slope 1/eps and
    // the road row's coupling to its x-neighbours through the ghost slope.
    const double ghost_x = gain / dx + 2.0 * params.a * eps / (dx * dx);
    return 2.0 * eps / (dx * dx) + 2.0 * eps / (dy * dy) + a1 / dx + a2 / dy + 1.0 / eps +
           (a2 + eps / dy) * ghost_x;
}

ScalarField phase_advance(const ScalarField& f, const Params& params, double eps, double dt) {
    const auto& g = f.spec;
    ScalarField next(g, f.quantity);
    parallel_for(g.ny, [&](std::size_t j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const auto s = phase_stencil(f, params, eps, i, j);
            const double v = f.at(i, j);
            const double h = numerical_hamiltonian(Scheme::Godunov, s.minus, s.plus, params, {0.0, 0.0});
            next.at(i, j) = v - dt * (-eps * s.laplacian + h - std::exp(-v / eps));
        }
    });
    for (double v : next.values) {
        if (!std::isfinite(v)) throw StabilityError("non-finite value in the eps-phase iterate");
    }
    return next;
}

// ---------------------------------------------------------------- strip ---

// Thomas algorithm; lower[0] and upper[n-1] are ignored. Overwrites rhs.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs,
                       std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    scratch.resize(n);
    double denom = diag[0];
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t k = 1; k < n; ++k) {
        denom = diag[k] - lower[k] * scratch[k - 1];
        scratch[k] = upper[k] / denom;
        rhs[k] = (rhs[k] - lower[k] * rhs[k - 1]) / denom;
    }
    for (std::size_t k = n - 1; k-- > 0;) rhs[k] -= scratch[k] * rhs[k + 1];
}

struct StripLayout {
    std::size_t nx = 0;
    std::size_t rows = 0;  // strip rows first, then field rows
    std::size_t strip_rows = 0;
    double dx = 0.0;
    std::vector<double> height;
    std::vector<double> centre;
    std::vector<double> diffusivity;
    std::vector<double> drift;
    std::vector<double> conductance;  // between row k and k + 1

    std::size_t at(std::size_t i, std::size_t k) const { return k * nx + i; }
};

StripLayout make_layout(const StripConfig& cfg) {
    StripLayout L;
    L.nx = cfg.spec.nx;
    L.strip_rows = cfg.strip_rows;
    L.rows = cfg.strip_rows + cfg.spec.ny;
    L.dx = (cfg.spec.x_max - cfg.spec.x_min) / static_cast<double>(cfg.spec.nx - 1);
    const double hs = cfg.delta / static_cast<double>(cfg.strip_rows);
    const double hf = cfg.spec.y_max / static_cast<double>(cfg.spec.ny);
    double y = 0.0;
    for (std::size_t k = 0; k < L.rows; ++k) {
        const bool strip = k < cfg.strip_rows;
        const double h = strip ? hs : hf;
        L.height.push_back(h);
        L.centre.push_back(y + 0.5 * h);
        L.diffusivity.push_back(strip ? cfg.sigma() : 1.0);
        L.drift.push_back(strip ? cfg.b_tilde() : 0.0);
        y += h;
    }
    for (std::size_t k = 0; k + 1 < L.rows; ++k) {
        L.conductance.push_back(
            1.0 / (L.height[k] / (2.0 * L.diffusivity[k]) + L.height[k + 1] / (2.0 * L.diffusivity[k + 1])));
    }
    return L;
}

void sweep_x(const StripLayout& L, std::vector<double>& u, double dt) {
    parallel_for(L.rows, [&](std::size_t k) {
        const std::size_t n = L.nx;
        const double d = L.diffusivity[k] * dt / (L.dx * L.dx);
        const double w = L.drift[k] * dt / L.dx;
        const double wp = std::max(w, 0.0);
        const double wm = std::min(w, 0.0);
        std::vector<double> lo(n), di(n), up(n), rhs(n), scratch;
        for (std::size_t i = 0; i < n; ++i) {
            const bool has_right = i + 1 < n;
            const bool has_left = i > 0;
            di[i] = 1.0 + (has_right ? d + wp : 0.0) + (has_left ? d - wm : 0.0);
            up[i] = has_right ? -d + wm : 0.0;
            lo[i] = has_left ? -d - wp : 0.0;
            rhs[i] = u[L.at(i, k)];
        }
        solve_tridiagonal(lo, di, up, rhs, scratch);
        for (std::size_t i = 0; i < n; ++i) u[L.at(i, k)] = rhs[i];
    });
}

void sweep_y(const StripLayout& L, std::vector<double>& u, double dt) {
    parallel_for(L.nx, [&](std::size_t i) {
        const std::size_t n = L.rows;
        std::vector<double> lo(n), di(n), up(n), rhs(n), scratch;
        for (std::size_t k = 0; k < n; ++k) {
            const double r = dt / L.height[k];
            const double g_up = k + 1 < n ? L.conductance[k] : 0.0;
            const double g_dn = k > 0 ? L.conductance[k - 1] : 0.0;
            di[k] = 1.0 + r * (g_up + g_dn);
            up[k] = -r * g_up;
            lo[k] = -r * g_dn;
            rhs[k] = u[L.at(i, k)];
        }
        solve_tridiagonal(lo, di, up, rhs, scratch);
        for (std::size_t k = 0; k < n; ++k) u[L.at(i, k)] = rhs[k];
    });
}

double total_mass(const StripLayout& L, const std::vector<double>& u) {
    double m = 0.0;
    for (std::size_t k = 0; k < L.rows; ++k) {
        double row = 0.0;
        for (std::size_t i = 0; i < L.nx; ++i) row += u[L.at(i, k)];
        m += row * L.height[k];
    }
    return m * L.dx;
}

}  // namespace

void validate(const EpsRunConfig& config) {
    validate(config.spec);
    if (!(config.eps > 0.0) || !std::isfinite(config.eps)) throw ConfigError("eps must be > 0");
    if (!(config.t_end > 0.0) || !std::isfinite(config.t_end)) throw ConfigError("t_end must be > 0");
    if (!(config.dt >= 0.0) || !std::isfinite(config.dt)) throw ConfigError("dt must be >= 0");
    if (!(config.cfl > 0.0 && config.cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
    if (!(config.k_init > 0.0) || !std::isfinite(config.k_init)) throw ConfigError("k_init must be > 0");
    if (config.spec.y_min != 0.0) throw ConfigError("the eps-phase window must start at y = 0");
}

PhaseRun solve_phase_eps(const EpsRunConfig& config, const Params& params) {
    validate(config);
    validate(params);
    const auto start = std::chrono::steady_clock::now();
    PhaseRun out;
    out.field = initial_data(config.spec, config.k_init);
    out.dt_min = std::numeric_limits<double>::infinity();
    out.min_value = std::numeric_limits<double>::infinity();
    double t = 0.0;
    while (t < config.t_end) {
        const double stable = config.cfl / phase_rate(out.field, params, config.eps);
        double dt = stable;
        if (config.dt > 0.0) {
            if (config.dt > stable * (1.0 + 1e-12)) {
                throw StabilityError("fixed dt " + std::to_string(config.dt) + " exceeds the stable step " +
                                     std::to_string(stable));
            }
            dt = config.dt;
        }
        dt = std::min(dt, config.t_end - t);
        if (config.t_end - (t + dt) < 1e-12 * config.t_end) dt = config.t_end - t;
        out.field = phase_advance(out.field, params, config.eps, dt);
        t = (dt == config.t_end - t) ? config.t_end : t + dt;
        ++out.steps;
        out.dt_min = std::min(out.dt_min, dt);
        out.dt_max = std::max(out.dt_max, dt);
        const double lo = *std::min_element(out.field.values.begin(), out.field.values.end());
        out.min_value = std::min(out.min_value, lo);
        if (lo < -1e-12) {
            throw InconsistencyError("eps-phase iterate went negative (" + std::to_string(lo) + ")");
        }
    }
    out.t_final = t;
    out.wall_seconds = seconds_since(start);
    return out;
}

double phase_collar(double eps, double t_end) { return 4.0 * std::sqrt(eps * t_end); }

GapReport phase_gap(const ScalarField& field, const Params& params, double t, double collar) {
    const auto& g = field.spec;
    if (field.values.size() != g.size()) throw DomainError("field size does not match its grid");
    if (!(collar >= 0.0)) throw ConfigError("collar must be >= 0");
    GapReport rep;
    rep.collar = collar;
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        if (y > g.y_max - collar + 1e-12) continue;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.x(i);
            if (x < g.x_min + collar - 1e-12 || x > g.x_max - collar + 1e-12) continue;
            const double e = std::abs(field.at(i, j) - solve_minimizer(params, {x, y, t}).v);
            ++rep.n_compared;
            if (e > rep.sup || rep.n_compared == 1) {
                rep.sup = e;
                rep.x_at_sup = x;
                rep.y_at_sup = y;
            }
        }
    }
    if (rep.n_compared == 0) throw ConfigError("collar leaves no interior nodes");
    return rep;
}

std::vector<GapReport> eps_trend(const Params& params, const EpsRunConfig& base,
                                 const std::vector<double>& eps_values) {
    if (eps_values.empty()) throw ConfigError("eps list is empty");
    const double widest = *std::max_element(eps_values.begin(), eps_values.end());
    const double collar = phase_collar(widest, base.t_end);
    std::vector<GapReport> out;
    for (double eps : eps_values) {
        auto cfg = base;
        cfg.eps = eps;
        const auto run = solve_phase_eps(cfg, params);
        auto rep = phase_gap(run.field, params, run.t_final, collar);
        rep.eps = eps;
        out.push_back(rep);
    }
    return out;
}

void validate(const StripConfig& config) {
    validate(config.spec);
    if (config.spec.y_min != 0.0) throw ConfigError("strip grid must have y_min = 0");
    if (!(config.delta > 0.0) || !std::isfinite(config.delta)) throw ConfigError("delta must be > 0");
    if (!(config.a_target > 0.0) || !std::isfinite(config.a_target)) throw ConfigError("a must be > 0");
    if (!std::isfinite(config.b_target)) throw ConfigError("b must be finite");
    if (!(config.dt >= 0.0) || !std::isfinite(config.dt)) throw ConfigError("dt must be >= 0");
    if (!(config.t_end > 0.0) || !std::isfinite(config.t_end)) throw ConfigError("t_end must be > 0");
    if (config.strip_rows < 4) throw ConfigError("strip must be resolved by at least 4 rows");
    if (!(config.x_collar >= 0.0) || 2.0 * config.x_collar >= config.spec.x_max - config.spec.x_min) {
        throw ConfigError("x_collar leaves no interior cells");
    }
}

StripReport solve_thin_strip(const StripConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const auto L = make_layout(config);
    std::vector<double> u(L.nx * L.rows);
    for (std::size_t k = 0; k < L.rows; ++k) {
        for (std::size_t i = 0; i < L.nx; ++i) {
            const double x = config.x_uniform_initial ? 0.0 : config.spec.x(i);
            const double y = L.centre[k];
            u[L.at(i, k)] = 0.5 * std::exp(-(x * x + y * y));
        }
    }

    StripReport rep;
    rep.delta = config.delta;
    const double mass0 = total_mass(L, u);
    const auto steps = static_cast<std::size_t>(std::ceil(config.t_end / config.step() - 1e-9));
    const double dt = config.t_end / static_cast<double>(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        double reaction = 0.0;
        for (std::size_t k = 0; k < L.rows; ++k) {
            double row = 0.0;
            for (std::size_t i = 0; i < L.nx; ++i) {
                double& v = u[L.at(i, k)];
                const double f = v * (1.0 - v);
                row += f;
                v += dt * f;
            }
            reaction += row * L.height[k];
        }
        rep.reaction_integral += dt * reaction * L.dx;
        sweep_x(L, u, dt);
        sweep_y(L, u, dt);
    }
    for (double v : u) {
        if (!std::isfinite(v)) throw StabilityError("non-finite value in the strip solution");
    }
    rep.steps = steps;
    rep.mass_change = total_mass(L, u) - mass0;

    // Road average and its Wentzell residual with the scheme's own x-operator.
    const std::size_t ns = L.strip_rows;
    std::vector<double> avg(L.nx, 0.0);
    for (std::size_t i = 0; i < L.nx; ++i) {
        for (std::size_t k = 0; k < ns; ++k) avg[i] += u[L.at(i, k)];
        avg[i] /= static_cast<double>(ns);
    }
    const double a = config.a_target;
    const double b = config.b_target;
    auto face_flux = [&](std::size_t i) {  // a-b flux through the face between i and i + 1
        const double adv = b >= 0.0 ? b * avg[i] : b * avg[i + 1];
        return -a * (avg[i + 1] - avg[i]) / L.dx + adv;
    };
    const double g_iface = L.conductance[ns - 1];
    const double hs = L.height[0];
    const double hf = L.height[ns];
    for (std::size_t i = 0; i < L.nx; ++i) {
        const double x = config.spec.x(i);
        if (x < config.spec.x_min + config.x_collar || x > config.spec.x_max - config.x_collar) continue;
        const double right = i + 1 < L.nx ? face_flux(i) : 0.0;
        const double left = i > 0 ? face_flux(i - 1) : 0.0;
        const double road_term = -(right - left) / L.dx;
        const double uy_plus = g_iface * (u[L.at(i, ns)] - u[L.at(i, ns - 1)]);
        rep.residual = std::max(rep.residual, std::abs(road_term + uy_plus));
        rep.interface_flux = std::max(rep.interface_flux, std::abs(uy_plus));
        // Second-order one-sided derivatives through the interface value
        // implied by flux continuity.
        const double s0 = u[L.at(i, ns - 1)];
        const double s1 = u[L.at(i, ns - 2)];
        const double f0 = u[L.at(i, ns)];
        const double f1 = u[L.at(i, ns + 1)];
        const double gs = 2.0 * config.sigma() / hs;
        const double gf = 2.0 / hf;
        const double ui = (gs * s0 + gf * f0) / (gs + gf);
        const double strip_side = config.sigma() * (8.0 * ui - 9.0 * s0 + s1) / (3.0 * hs);
        const double field_side = (-8.0 * ui + 9.0 * f0 - f1) / (3.0 * hf);
        rep.flux_mismatch += std::abs(strip_side - field_side) * L.dx;
        rep.flux_scale += std::abs(uy_plus) * L.dx;
    }
    rep.wall_seconds = seconds_since(start);
    return rep;
}

CsvTable gap_table(const std::vector<GapReport>& gaps) {
    CsvTable t{{"param", "value", "metric"}, {}};
    for (const auto& g : gaps) t.add_row({"eps", format_number(g.eps), format_number(g.sup)});
    return t;
}

CsvTable residual_table(const std::vector<StripReport>& reports) {
    CsvTable t{{"param", "value", "metric"}, {}};
    for (const auto& r : reports) t.add_row({"delta", format_number(r.delta), format_number(r.residual)});
    return t;
}

}  // namespace fieldroad
