#pragma once

// Explicit monotone finite differences for the obstacle problem
//
//   min{ v_t + |grad v|^2 + c v_x + 1, v } = 0   in y > 0,
//   a v_x^2 - v_y + b v_x = 0                    on y = 0,
//
// started from steep cone data k min(1, |x|). The grid solution is an
// independent check on the closed form v = max{0, phi* - t}.

#include <array>
#include <cstddef>
#include <string>

#include "fieldroad/core.hpp"
#include "fieldroad/grid.hpp"

namespace fieldroad {

enum class Scheme { LaxFriedrichs, Godunov };

std::string to_string(Scheme scheme);
/// Accepts "lax_friedrichs"/"lf" and "godunov"; throws ConfigError otherwise.
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
    GridSpec spec{-4.0, 10.0, 0.0, 5.0, 141, 71};
    double cfl = 0.4;
    double t_end = 1.0;
    double k_init = 50.0;
    Scheme scheme = Scheme::Godunov;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Throws ConfigError unless cfl in (0, 1), t_end > 0, k_init > 0 and the
/// grid is valid.
void validate(const SolverConfig& config);

/// k min(1, sqrt(x^2 + y^2)). The origin must be a grid node (ConfigError
/// otherwise) so that the data vanish there and only there.
ScalarField initial_data(const GridSpec& spec, double k);

/// Monotone numerical Hamiltonian for |p|^2 + c p_1 + 1 from one-sided
/// slopes. Lax-Friedrichs needs artificial_viscosity[k] >= max |dH/dp_k| at
/// both slopes and throws StabilityError when it is smaller; Godunov ignores it.
double numerical_hamiltonian(Scheme scheme, const std::array<double, 2>& p_minus,
                             const std::array<double, 2>& p_plus, const Params& params,
                             const std::array<double, 2>& artificial_viscosity);

struct StepBounds {
    std::array<double, 2> viscosity{};  // global max |dH/dp_k| over all one-sided slopes
    double max_gradient = 0.0;          // global max |slope|, road ghost included
    double rate = 0.0;                  // max over nodes of the update's center coefficient
    double dt_max = 0.0;                // cfl-scaled stable step
};

StepBounds stability_bounds(const ScalarField& state, const SolverConfig& config,
                            const Params& params);

/// One explicit step v <- max(0, v - dt H^). The y = 0 row (when y_min = 0)
/// uses the ghost value v_0 - dy (a v_x^2 + b v_x); the other window edges
/// copy out. Throws StabilityError if dt exceeds stability_bounds().dt_max
/// or the result is not finite.
ScalarField step(const ScalarField& state, const SolverConfig& config, const Params& params,
                 double dt);

struct SolveResult {
    ScalarField field;
    double t_final = 0.0;
    std::size_t steps = 0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    std::size_t active_nodes = 0;  // nodes where the obstacle holds, v == 0
    double wall_seconds = 0.0;
};

SolveResult solve(const SolverConfig& config, const Params& params);

struct ErrorReport {
    double linf = 0.0;
    double l1 = 0.0;  // sum |error| dx dy
    std::size_t collar = 0;
    std::size_t n_compared = 0;
    double x_at_linf = 0.0;
    double y_at_linf = 0.0;
};

/// Discrepancy with max{0, phi*(x, y, t) - t} on the nodes at least `collar`
/// cells away from the truncation edges (left, right, top; the bottom edge
/// too when y_min > 0). Throws ConfigError if `window` differs from the
/// field's grid.
ErrorReport compare_to_closed_form(const ScalarField& solved, const Params& params, double t,
                                   const GridSpec& window, std::size_t collar = 5);

/// As above, and throws DomainError unless t equals the solve's final time.
ErrorReport compare_to_closed_form(const SolveResult& solved, const Params& params, double t,
                                   const GridSpec& window, std::size_t collar = 5);

}  // namespace fieldroad
