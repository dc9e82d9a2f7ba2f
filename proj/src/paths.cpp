#include "fieldroad/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fieldroad/errors.hpp"

namespace fieldroad {

namespace {

PathSegment field_segment(const SpaceTimePoint& p, double t_end, const Vec2& eta) {
    PathSegment seg;
    seg.tau_begin = 0.0;
    seg.tau_end = t_end;
    seg.start = {p.x, p.y};
    seg.velocity = eta;
    seg.eta = eta;
    seg.l = 0.0;
    seg.on_road = false;
    return seg;
}

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

Vec2 PathPlan::position(double tau) const {
    const auto& seg = segment_at(tau);
    const double dt = tau - seg.tau_begin;
    return {seg.start[0] + dt * seg.velocity[0], seg.start[1] + dt * seg.velocity[1]};
}

const PathSegment& PathPlan::segment_at(double tau) const {
    if (segments.empty()) throw DomainError("empty path plan");
    for (const auto& seg : segments) {
        if (tau < seg.tau_end) return seg;
    }
    return segments.back();
}

PathPlan build_optimal_plan(const Params& params, const SpaceTimePoint& p) {
    const auto e = solve_minimizer(params, p);
    const double a = params.a;
    const double b = params.b;
    const double c = params.c;
    const double x = p.x;
    const double y = p.y;
    const double t = p.t;
    const double s = e.s_star;

    PathPlan plan;
    plan.params = params;
    plan.origin = p;
    plan.regime = e.regime;
    plan.s_bar = s;
    plan.eta = {-(x + (a * c - b) * s) / (t + a * s), -(y + s) / t};
    plan.l_road = (y + s) / t;

    if (y + s > 0.0 && y > 0.0) {
        plan.t0 = y * t / (y + s);
        plan.x0 = x - y * t * (x + (a * c - b) * s) / ((y + s) * (t + a * s));
    } else {
        // y = 0: the whole path runs along the road (for s = 0 it is the
        // straight segment traversed with l = 0).
        plan.t0 = 0.0;
        plan.x0 = x;
    }

    if (s == 0.0 && y > 0.0) {
        // Rectilinear: a single straight segment, t0 = t.
        plan.t0 = t;
        plan.x0 = 0.0;
        plan.segments.push_back(field_segment(p, t, plan.eta));
        return plan;
    }

    if (plan.t0 > 0.0) plan.segments.push_back(field_segment(p, plan.t0, plan.eta));

    PathSegment road;
    road.tau_begin = plan.t0;
    road.tau_end = t;
    road.start = {plan.x0, 0.0};
    road.velocity = {(t * y * (a * c - b) - x * (t + a * s + a * y)) / (t * (t + a * s)), 0.0};
    road.eta = plan.eta;
    road.l = plan.l_road;
    road.on_road = true;
    plan.segments.push_back(road);
    return plan;
}

double jensen_equality_residual(const PathPlan& plan) {
    const double a = plan.params.a;
    const double b = plan.params.b;
    const double c = plan.params.c;
    double worst = 0.0;
    for (const auto& seg : plan.segments) {
        const double predicted = (1.0 + a * seg.l) * seg.eta[0] + (a * c - b) * seg.l;
        worst = std::max(worst, std::abs(seg.velocity[0] - predicted));
        // (H2): gamma' = eta off the road, eta_2 = gamma_2' - l on it.
        const double second = seg.l > 0.0 ? seg.eta[1] - (seg.velocity[1] - seg.l)
                                           : seg.eta[1] - seg.velocity[1];
        worst = std::max(worst, std::abs(second));
    }
    return worst;
}

double running_cost(const Params& params, const PathSegment& segment) {
    const auto forms = legendre_forms(params, {-segment.eta[0], -segment.eta[1]});
    double road_term = 0.0;
    if (segment.l > 0.0) {
        const double m = segment.eta[0] - segment.velocity[0] - params.b * segment.l;
        road_term = m * m / (4.0 * params.a * segment.l);
    }
    return forms.L + road_term;
}

PayoffQuadrature path_payoff(const Params& params, const PathPlan& plan, const SpaceTimePoint& p,
                             std::size_t panels_per_segment) {
    if (!(plan.origin == p) || !(plan.params == params)) {
        throw DomainError("path plan was built for a different point or parameter set");
    }
    if (panels_per_segment == 0) throw DomainError("path_payoff needs at least one panel");
    PayoffQuadrature q;
    q.rule = "midpoint";
    for (const auto& seg : plan.segments) {
        const double h = seg.duration() / static_cast<double>(panels_per_segment);
        for (std::size_t k = 0; k < panels_per_segment; ++k) {
            // Controls are constant per leg; the midpoint only selects the leg.
            q.value += h * running_cost(params, seg);
            ++q.n_samples;
        }
    }
    return q;
}

SpaceTimePoint locate_front_point(const Params& params, double theta, double t) {
    if (!(t > 0.0)) throw DomainError("locate_front_point requires t > 0");
    if (theta < 0.0 || theta > std::numbers::pi) {
        throw DomainError("locate_front_point requires theta in [0, pi]");
    }
    const double cx = params.c * t;
    const double dx = std::cos(theta);
    const double dy = std::max(0.0, std::sin(theta));
    auto excess = [&](double r) {
        return solve_minimizer(params, {cx + r * dx, r * dy, t}).phi_star - t;
    };
    double lo = 0.0;
    double hi = std::max(1.0, t);
    for (int k = 0; excess(hi) <= 0.0; ++k) {
        if (k > 60) throw BracketError("front not found along ray");
        lo = hi;
        hi *= 2.0;
    }
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    const double r = 0.5 * (lo + hi);
    return {cx + r * dx, r * dy, t};
}

double freidlin_surplus(const Params& params, const SpaceTimePoint& p, double s_bar, double tau) {
    const double a = params.a;
    const double t = p.t;
    const double d = p.x - params.b * s_bar - params.c * t;
    const double w = t + a * s_bar;
    return a * d * d * tau * s_bar / (4.0 * t * w * w);
}

FreidlinReport freidlin_check(const Params& params, const SpaceTimePoint& p, std::size_t n_samples,
                              const FreidlinTolerances& tol) {
    if (n_samples == 0) throw DomainError("freidlin_check needs n_samples > 0");
    const auto e = solve_minimizer(params, p);
    if (std::abs(e.phi_star - p.t) > tol.boundary * (1.0 + p.t)) {
        throw DomainError("freidlin_check requires a front point with phi* = t");
    }
    const auto plan = build_optimal_plan(params, p);

    FreidlinReport report;
    report.regime = e.regime;
    report.n_samples = n_samples;
    report.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double tau = p.t * static_cast<double>(k) / static_cast<double>(n_samples);
        const auto g = plan.position(tau);
        const double remaining = p.t - tau;
        const double phi = solve_minimizer(params, {g[0], clamp_nonneg(g[1]), remaining}).phi_star;
        const double margin = phi - remaining;
        report.min_margin = std::min(report.min_margin, margin);
        if (e.regime == Regime::Rectilinear) {
            report.equality_error = std::max(report.equality_error, std::abs(margin));
        } else if (tau <= plan.t0) {
            const double surplus = freidlin_surplus(params, p, plan.s_bar, tau);
            report.surplus_error = std::max(report.surplus_error, std::abs(margin - surplus));
        }
    }
    report.max_violation = std::max(0.0, -report.min_margin);
    report.passed = report.min_margin >= -tol.inequality && report.equality_error <= tol.equality &&
                    report.surplus_error <= tol.surplus;
    return report;
}

PerturbationResult epsilon_road_perturbation(const Params& params, const SpaceTimePoint& p,
                                             double eps, std::size_t n_samples) {
    if (p.y != 0.0) throw DomainError("road perturbation requires y = 0");
    if (!(p.x > 0.0)) throw DomainError("road perturbation requires x > 0");
    if (!(eps >= 0.0)) throw DomainError("road perturbation requires eps >= 0");
    if (n_samples < 2) throw DomainError("road perturbation needs at least two samples");

    const double a = params.a;
    const double b = params.b;
    const double c = params.c;
    const double x = p.x;
    const double t = p.t;
    const double s = solve_minimizer(params, p).s_star;
    const double l = s / t;

    auto leg = [&](double shift, double begin, double end, Vec2 start) {
        PathSegment seg;
        seg.tau_begin = begin;
        seg.tau_end = end;
        seg.start = start;
        seg.eta = {-(x + shift + (a * c - b) * s) / (t + a * s), -s / t};
        seg.l = l;
        seg.on_road = true;
        seg.velocity = {(1.0 + a * l) * seg.eta[0] + (a * c - b) * l, 0.0};
        return seg;
    };
    const auto first = leg(-eps, 0.0, 0.5 * t, {x, 0.0});
    const auto second =
        leg(+eps, 0.5 * t, t, {x + 0.5 * t * first.velocity[0], 0.0});

    PerturbationResult out;
    out.eps = eps;
    out.payoff = first.duration() * running_cost(params, first) +
                 second.duration() * running_cost(params, second);
    out.endpoint_error = std::abs(second.start[0] + second.duration() * second.velocity[0]);

    const double optimal_speed = -x / t;
    out.strictly_ahead = true;
    out.min_interior_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n_samples; ++k) {
        const double tau = t * static_cast<double>(k) / static_cast<double>(n_samples);
        const auto& seg = tau < first.tau_end ? first : second;
        const double g1 = seg.start[0] + (tau - seg.tau_begin) * seg.velocity[0];
        const double optimal = x + tau * optimal_speed;
        if (!(g1 > optimal)) out.strictly_ahead = false;
        const double phi = solve_minimizer(params, {g1, 0.0, t - tau}).phi_star;
        out.min_interior_margin = std::min(out.min_interior_margin, phi - (t - tau));
    }
    return out;
}

}  // namespace fieldroad
