#pragma once

// Parabolic simulators behind the two singular limits:
//  - the eps-scaled phase equation
//      v_t - eps Lap v + |grad v|^2 + c v_x + 1 - exp(-v / eps) = 0,
//      -a eps v_xx + a v_x^2 + b v_x - v_y = 0 on y = 0,
//    whose solution approaches max{0, phi* - t} as eps -> 0;
//  - a Fisher-KPP field over a thin strip of width delta with diffusivity
//    a / delta and drift b / delta, whose road average approaches the
//    Wentzell relation a u_xx - b u_x + u_y = 0 as delta -> 0.

#include <cstddef>
#include <vector>

#include "fieldroad/core.hpp"
#include "fieldroad/csv.hpp"
#include "fieldroad/grid.hpp"

namespace fieldroad {

struct EpsRunConfig {
    double eps = 0.2;
    GridSpec spec{-4.0, 10.0, 0.0, 5.0, 141, 51};
    double t_end = 1.0;
    double dt = 0.0;  // 0 picks the stable step automatically every step
    double cfl = 0.4;
    double k_init = 50.0;

    friend bool operator==(const EpsRunConfig&, const EpsRunConfig&) = default;
};

/// Throws ConfigError on eps <= 0, t_end <= 0, dt < 0, cfl outside (0, 1)
/// or k_init <= 0.
void validate(const EpsRunConfig& config);

struct PhaseRun {
    ScalarField field;
    double t_final = 0.0;
    std::size_t steps = 0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    double min_value = 0.0;
    double wall_seconds = 0.0;
};

/// Explicit Godunov-upwind gradient, centred Laplacian, exact exp(-v/eps).
/// A fixed dt above the stability bound throws StabilityError; a value
/// below -1e-12 throws InconsistencyError.
PhaseRun solve_phase_eps(const EpsRunConfig& config, const Params& params);

struct GapReport {
    double eps = 0.0;
    double sup = 0.0;
    double collar = 0.0;  // width excluded at the truncation edges
    std::size_t n_compared = 0;
    double x_at_sup = 0.0;
    double y_at_sup = 0.0;
};

/// sup |v^eps - max{0, phi* - t}| over nodes at distance >= collar from the
/// left, right and top edges.
GapReport phase_gap(const ScalarField& field, const Params& params, double t, double collar);

/// 4 sqrt(eps t_end).
double phase_collar(double eps, double t_end);

/// One run per eps, all compared on the window left by the widest collar.
std::vector<GapReport> eps_trend(const Params& params, const EpsRunConfig& base,
                                 const std::vector<double>& eps_values);

struct StripConfig {
    double delta = 0.1;
    double a_target = 2.0;
    double b_target = 2.0;
    /// x nodes (cell centres) from x_min..x_max with nx cells; the field
    /// layer spans [delta, delta + y_max] in ny cells. y_min must be 0.
    GridSpec spec{-15.0, 15.0, 0.0, 5.0, 151, 50};
    std::size_t strip_rows = 8;
    double x_collar = 5.0;  // residual and fluxes skip cells this close to the x-edges
    double dt = 0.0;  // 0 means 0.025 delta^2
    double t_end = 1.0;
    bool x_uniform_initial = false;  // u0 depends on y only

    double sigma() const noexcept { return a_target / delta; }
    double b_tilde() const noexcept { return b_target / delta; }
    double step() const noexcept { return dt > 0.0 ? dt : 0.025 * delta * delta; }

    friend bool operator==(const StripConfig&, const StripConfig&) = default;
};

/// Throws ConfigError on bad sizes or negative coefficients; strip_rows < 4
/// is a resolution error (ConfigError).
void validate(const StripConfig& config);

struct StripReport {
    double delta = 0.0;
    double residual = 0.0;        // sup_x |a v_xx - b v_x + u_y(delta+)| at t_end, inside the x-collar
    double interface_flux = 0.0;  // sup_x |u_y(delta+)|
    double flux_mismatch = 0.0;   // integral_x |sigma u_y(delta-) - u_y(delta+)|, one-sided quadratics
    double flux_scale = 0.0;      // integral_x |u_y(delta+)|
    double mass_change = 0.0;     // total mass(t_end) - mass(0)
    double reaction_integral = 0.0;  // integral over time and space of u(1 - u)
    std::size_t steps = 0;
    double wall_seconds = 0.0;
};

/// Lie splitting per step: explicit logistic reaction, implicit x sweep
/// (diffusion, upwind strip drift), implicit y sweep with harmonic face
/// diffusivities. No-flux on every outer edge.
StripReport solve_thin_strip(const StripConfig& config);

/// Header: param,value,metric
CsvTable gap_table(const std::vector<GapReport>& gaps);
CsvTable residual_table(const std::vector<StripReport>& reports);

}  // namespace fieldroad
