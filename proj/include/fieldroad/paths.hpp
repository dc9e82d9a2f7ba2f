#pragma once

// Optimal control triplets (gamma, eta, l) realizing phi* - t, their payoff
// quadrature, and the Freidlin-condition audit along them.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "fieldroad/core.hpp"

namespace fieldroad {

using Vec2 = std::array<double, 2>;

/// Affine piece of a trajectory: gamma(tau) = start + (tau - tau_begin) * velocity
/// on [tau_begin, tau_end], with constant controls eta and road intensity l.
struct PathSegment {
    double tau_begin = 0.0;
    double tau_end = 0.0;
    Vec2 start{};
    Vec2 velocity{};
    Vec2 eta{};
    double l = 0.0;
    bool on_road = false;

    double duration() const noexcept { return tau_end - tau_begin; }
};

struct PathPlan {
    Params params;
    SpaceTimePoint origin;  // the point (x, y, t) the plan was built for
    Regime regime = Regime::Rectilinear;
    double s_bar = 0.0;
    double t0 = 0.0;  // road-hitting time
    double x0 = 0.0;  // road-hitting abscissa
    Vec2 eta{};
    double l_road = 0.0;
    std::vector<PathSegment> segments;  // field leg (if any), then road leg (if any)

    Vec2 position(double tau) const;
    const PathSegment& segment_at(double tau) const;
};

PathPlan build_optimal_plan(const Params& params, const SpaceTimePoint& p);

/// Max over segments of |gamma_1' - ((1 + a l) eta_1 + (ac - b) l)| and the
/// H2 relation residual for gamma_2. Both vanish for optimal plans.
double jensen_equality_residual(const PathPlan& plan);

struct PayoffQuadrature {
    double value = 0.0;
    std::string rule;
    std::size_t n_samples = 0;
};

/// Running cost L(-eta) + F(gamma, eta, l) for one segment.
double running_cost(const Params& params, const PathSegment& segment);

/// Midpoint rule with panels_per_segment panels on each leg. The integrand
/// of an optimal plan is constant per leg, so one panel is exact.
PayoffQuadrature path_payoff(const Params& params, const PathPlan& plan, const SpaceTimePoint& p,
                             std::size_t panels_per_segment = 1);

/// Point of the front {phi*(., t) = t} along the ray from (ct, 0) at angle
/// theta in [0, pi], found by 60 bisection steps.
SpaceTimePoint locate_front_point(const Params& params, double theta, double t);

struct FreidlinTolerances {
    double boundary = 1e-9;  // precondition |phi*(p) - t|, relative to 1 + t
    double inequality = 1e-9;
    double equality = 1e-9;
    double surplus = 1e-8;
};

struct FreidlinReport {
    Regime regime = Regime::Rectilinear;
    std::size_t n_samples = 0;
    double min_margin = 0.0;      // min_tau phi*(gamma(tau), t - tau) - (t - tau)
    double max_violation = 0.0;   // max(0, -min_margin)
    double equality_error = 0.0;  // Regime I: max |margin|
    double surplus_error = 0.0;   // Regime II field leg: max |margin - closed-form surplus|
    bool passed = false;
};

/// Closed-form surplus a (x - b s - c t)^2 tau s / (4 t (t + a s)^2) on the
/// field leg of a RoadAssisted front point.
double freidlin_surplus(const Params& params, const SpaceTimePoint& p, double s_bar, double tau);

FreidlinReport freidlin_check(const Params& params, const SpaceTimePoint& p, std::size_t n_samples,
                              const FreidlinTolerances& tol = {});

struct PerturbationResult {
    double eps = 0.0;
    double payoff = 0.0;
    double endpoint_error = 0.0;       // |gamma^eps(t)|
    bool strictly_ahead = false;       // gamma_1^eps > gamma_1 on sampled (0, t)
    double min_interior_margin = 0.0;  // min over sampled (0, t) of phi*(gamma^eps, t - tau) - (t - tau)
};

/// Two-phase road perturbation of the optimal triplet at (x, 0, t), x > 0.
PerturbationResult epsilon_road_perturbation(const Params& params, const SpaceTimePoint& p,
                                             double eps, std::size_t n_samples = 64);

}  // namespace fieldroad
