#include "fieldroad/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fieldroad/errors.hpp"
#include "fieldroad/parallel.hpp"

namespace fieldroad {

namespace {

std::string describe(const SpaceTimePoint& p) {
    std::ostringstream os;
    os.precision(17);
    os << "(x=" << p.x << ", y=" << p.y << ", t=" << p.t << ")";
    return os.str();
}

double objective_unchecked(const Params& params, const SpaceTimePoint& p, double s) {
    const double u = -p.x + params.b * s + params.c * p.t;
    const double w = p.t + params.a * s;
    return u * u / (4.0 * w) + (p.y + s) * (p.y + s) / (4.0 * p.t);
}

ObjectiveDerivatives derivatives_unchecked(const Params& params, const SpaceTimePoint& p, double s) {
    const double a = params.a;
    const double b = params.b;
    const double u = -p.x + b * s + params.c * p.t;
    const double w = p.t + a * s;
    ObjectiveDerivatives d;
    d.f_s = -a * u * u / (4.0 * w * w) + b * u / (2.0 * w) + (p.y + s) / (2.0 * p.t);
    // bw - au does not depend on s.
    const double k = a * (p.x - params.c * p.t) + b * p.t;
    const double w3 = w * w * w;
    d.f_ss = (w3 + p.t * k * k) / (2.0 * p.t * w3);
    return d;
}

// Shared doubling cap for the sign-change search.
constexpr int kMaxDoublings = 64;

double initial_cap(const Params& params, const SpaceTimePoint& p) {
    const double drift = std::abs(params.b);
    const double scale = drift > 0.0 ? std::min(1.0, drift) : 1.0;
    return 8.0 *
           (std::abs(p.x) + std::abs(params.c) * p.t + drift * p.t + p.y + p.t) / scale;
}

bool collapsed(double lo, double hi) {
    return hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi));
}

}  // namespace

void validate(const Params& params) {
    if (!std::isfinite(params.a) || !std::isfinite(params.b) || !std::isfinite(params.c)) {
        throw DomainError("model coefficients must be finite");
    }
    if (!(params.a > 0.0)) {
        throw DomainError("road diffusivity a must be > 0");
    }
}

void validate(const SpaceTimePoint& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t)) {
        throw DomainError("non-finite point " + describe(p));
    }
    if (!(p.t > 0.0)) {
        throw DomainError("time must be > 0 at " + describe(p));
    }
    if (p.y < 0.0) {
        throw DomainError("y must be >= 0 at " + describe(p));
    }
}

std::string to_string(Regime regime) {
    return regime == Regime::Rectilinear ? "Rectilinear" : "RoadAssisted";
}

double objective(const Params& params, const SpaceTimePoint& p, double s) {
    validate(params);
    validate(p);
    if (!(s >= 0.0)) throw DomainError("objective requires s >= 0");
    return objective_unchecked(params, p, s);
}

ObjectiveDerivatives objective_derivatives(const Params& params, const SpaceTimePoint& p,
                                           double s) {
    validate(params);
    validate(p);
    if (!(s >= 0.0)) throw DomainError("objective_derivatives requires s >= 0");
    return derivatives_unchecked(params, p, s);
}

double critical_boundary_y(const Params& params, double x, double t) {
    if (!(t > 0.0)) throw DomainError("critical_boundary_y requires t > 0");
    const double d = x - params.c * t;
    return params.a / (2.0 * t) * d * d + params.b * d;
}

Regime classify(const Params& params, const SpaceTimePoint& p) {
    const double gap = p.y - critical_boundary_y(params, p.x, p.t);
    return gap >= -tolerance::classify ? Regime::Rectilinear : Regime::RoadAssisted;
}

RootBracket bracket_minimizer(const Params& params, const SpaceTimePoint& p) {
    validate(params);
    validate(p);
    double cap = initial_cap(params, p);
    for (int k = 0; k <= kMaxDoublings; ++k) {
        if (derivatives_unchecked(params, p, cap).f_s > 0.0) return {0.0, cap};
        cap *= 2.0;
    }
    std::ostringstream os;
    os.precision(17);
    os << "no sign change of f_s on [0, " << cap << "] at " << describe(p);
    throw BracketError(os.str());
}

Evaluation solve_minimizer(const Params& params, const SpaceTimePoint& p) {
    validate(params);
    validate(p);
    Evaluation e;
    e.outside_theorem_scope = !params.in_theorem_scope();
    e.regime = classify(params, p);

    if (e.regime == Regime::RoadAssisted && derivatives_unchecked(params, p, 0.0).f_s < 0.0) {
        auto [lo, hi] = bracket_minimizer(params, p);
        double s = 0.5 * (lo + hi);
        for (int iter = 0; iter < 400; ++iter) {
            const auto d = derivatives_unchecked(params, p, s);
            if (std::abs(d.f_s) <= tolerance::root) break;
            (d.f_s < 0.0 ? lo : hi) = s;
            if (collapsed(lo, hi)) break;
            double next = s - d.f_s / d.f_ss;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            s = next;
        }
        e.s_star = s;
        e.phi_star = objective_unchecked(params, p, s);
    } else {
        const double d = params.c * p.t - p.x;
        e.s_star = 0.0;
        e.phi_star = (d * d + p.y * p.y) / (4.0 * p.t);
    }
    e.J = e.phi_star - p.t;
    e.v = std::max(0.0, e.J);
    return e;
}

CubicCoefficients cubic_coefficients(const Params& params, const SpaceTimePoint& p) {
    validate(params);
    validate(p);
    const double a = params.a;
    const double b = params.b;
    const double t = p.t;
    const double y = p.y;
    CubicCoefficients k;
    k.c3 = 2.0 * a * a;
    k.c2 = 2.0 * a * a * y + a * b * b * t + 4.0 * a * t;
    k.c1 = 4.0 * a * t * y + 2.0 * b * b * t * t + 2.0 * t * t;
    // Factored form of -ac^2t^3 + 2act^2x - atx^2 + 2bct^3 - 2bt^2x + 2t^2y;
    // avoids cancellation near the critical curve.
    k.c0 = 2.0 * t * t * (y - critical_boundary_y(params, p.x, t));
    return k;
}

double minimizer_via_cubic(const Params& params, const SpaceTimePoint& p) {
    const auto cubic = cubic_coefficients(params, p);
    if (cubic.c0 >= 0.0) return 0.0;

    auto [lo, hi] = bracket_minimizer(params, p);
    double s = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        const double value = cubic(s);
        if (value == 0.0) break;
        (value < 0.0 ? lo : hi) = s;
        if (collapsed(lo, hi)) break;
        double next = s - value / cubic.derivative(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-16 * (1.0 + s)) {
            s = next;
            break;
        }
        s = next;
    }

    const double reference = solve_minimizer(params, p).s_star;
    if (std::abs(s - reference) > tolerance::cross * (1.0 + reference)) {
        std::ostringstream os;
        os.precision(17);
        os << "cubic root " << s << " disagrees with f_s root " << reference << " at "
           << describe(p);
        throw InconsistencyError(os.str());
    }
    return s;
}

std::vector<EvalOutcome> evaluate(const Params& params, std::span<const SpaceTimePoint> points) {
    std::vector<EvalOutcome> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        try {
            out[i] = solve_minimizer(params, points[i]);
        } catch (const Error& err) {
            out[i] = PointError{i, err.kind(), err.what()};
        }
    });
    return out;
}

HomogeneityResidual homogeneity_check(const Params& params, const SpaceTimePoint& unit_point,
                                      double lambda) {
    if (!(lambda > 0.0)) throw DomainError("homogeneity_check requires lambda > 0");
    if (unit_point.t != 1.0) throw DomainError("homogeneity_check expects a point at t = 1");
    const auto base = solve_minimizer(params, unit_point);
    const auto scaled = solve_minimizer(
        params, {lambda * unit_point.x, lambda * unit_point.y, lambda});
    return {std::abs(scaled.phi_star - lambda * base.phi_star),
            std::abs(scaled.s_star - lambda * base.s_star)};
}

LegendreForms legendre_forms(const Params& params, std::array<double, 2> q) {
    validate(params);
    const double c = params.c;
    LegendreForms out;
    out.L = (q[0] * q[0] + q[1] * q[1]) / 4.0 - c / 2.0 * q[0] + c * c / 4.0 - 1.0;
    out.G = (q[0] - params.b) * (q[0] - params.b) / (4.0 * params.a);
    return out;
}

}  // namespace fieldroad
