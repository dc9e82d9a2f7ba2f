#include "fieldroad/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fieldroad/errors.hpp"

namespace fieldroad {

namespace {

// Reflected points of the closed cone can land a rounding error below y = 0.
double snap_to_halfplane(double y, double scale) {
    return (y < 0.0 && y >= -1e-12 * (1.0 + scale)) ? 0.0 : y;
}

}  // namespace

void validate(const ConeConfig& cfg) {
    if (!std::isfinite(cfg.alpha) || !(cfg.alpha > 0.0) || cfg.alpha > 0.5 * std::numbers::pi) {
        throw ConfigError("cone alpha must lie in (0, pi/2]");
    }
    for (const auto* road : {&cfg.road0, &cfg.road_alpha}) {
        if (!std::isfinite(road->a) || !std::isfinite(road->b)) {
            throw ConfigError("road parameters must be finite");
        }
        if (!(road->a > 0.0)) throw ConfigError("road diffusivity must be > 0");
    }
    if (cfg.field_advection != 0.0) {
        throw ConfigError("field advection is not supported in the cone");
    }
}

std::array<double, 2> psi_alpha(const ConeConfig& cfg, const std::array<double, 2>& pt) {
    const double c2 = std::cos(2.0 * cfg.alpha);
    const double s2 = std::sin(2.0 * cfg.alpha);
    return {pt[0] * c2 + pt[1] * s2, pt[0] * s2 - pt[1] * c2};
}

bool inside_cone(const ConeConfig& cfg, const std::array<double, 2>& pt) {
    const double r = std::hypot(pt[0], pt[1]);
    if (r == 0.0) return true;
    const double tol = 1e-12;
    if (pt[1] < -tol * r) return false;
    const double theta = std::atan2(std::max(pt[1], 0.0), pt[0]);
    return theta <= 2.0 * cfg.alpha + tol;
}

double payoff_J_halfplane(const RoadParams& road, const SpaceTimePoint& p) {
    return solve_minimizer({road.a, road.b, 0.0}, p).J;
}

ConePayoff cone_payoff(const ConeConfig& cfg, const SpaceTimePoint& p) {
    validate(cfg);
    validate(p);
    if (!inside_cone(cfg, {p.x, p.y})) throw DomainError("point lies outside the cone");
    const auto q = psi_alpha(cfg, {p.x, p.y});
    ConePayoff out;
    out.J_gamma0 = payoff_J_halfplane(cfg.road0, p);
    out.J_gamma_alpha = payoff_J_halfplane(
        cfg.road_alpha, {q[0], snap_to_halfplane(q[1], std::abs(q[0])), p.t});
    out.J_alpha = std::min(out.J_gamma0, out.J_gamma_alpha);
    return out;
}

double payoff_J_alpha(const ConeConfig& cfg, const SpaceTimePoint& p) {
    return cone_payoff(cfg, p).J_alpha;
}

Theorem5Report theorem5_condition(const ConeConfig& cfg, double r_max, std::size_t n_samples,
                                  Theorem5Form form, double tolerance) {
    validate(cfg);
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
        throw DomainError("theorem5_condition requires r_max > 0");
    }
    if (n_samples < 2) throw DomainError("theorem5_condition needs at least two samples");
    Theorem5Report rep;
    rep.form = form;
    const double c2 = std::cos(2.0 * cfg.alpha);
    const double s2 = std::sin(2.0 * cfg.alpha);
    double worst = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double r = r_max * static_cast<double>(k) / static_cast<double>(n_samples - 1);
        SpaceTimePoint q{r, 0.0, 1.0};
        if (form == Theorem5Form::Literal) q = {r * c2, std::max(0.0, r * s2), 1.0};
        const double lhs = payoff_J_halfplane(cfg.road_alpha, q);
        const double rhs = payoff_J_halfplane(cfg.road0, {r, 0.0, 1.0});
        rep.r.push_back(r);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.max_violation = std::max(rep.max_violation, lhs - rhs);
        rep.max_abs_gap = std::max(rep.max_abs_gap, std::abs(lhs - rhs));
        worst = std::max(worst, lhs - rhs - tolerance * (1.0 + std::abs(rhs)));
    }
    rep.passed = worst <= 0.0;
    return rep;
}

WAlphaValue value_w_alpha(const ConeConfig& cfg, const SpaceTimePoint& p,
                          const Theorem5Report* condition, bool override_unverified) {
    WAlphaValue out;
    out.condition_verified = condition != nullptr && condition->passed;
    if (!out.condition_verified) {
        if (!override_unverified) {
            throw DomainError("cone admissibility condition is not verified for this configuration");
        }
        out.warning = "cone admissibility condition unverified; value computed under override";
    }
    out.value = std::max(0.0, payoff_J_alpha(cfg, p));
    return out;
}

CsvTable cone_table(const ConeConfig& cfg, const std::vector<SpaceTimePoint>& points) {
    CsvTable table;
    table.header = {"x", "y", "t", "J_gamma0", "J_gamma_alpha", "J_alpha", "w_alpha"};
    for (const auto& p : points) {
        const auto c = cone_payoff(cfg, p);
        table.add_row({format_number(p.x), format_number(p.y), format_number(p.t),
                       format_number(c.J_gamma0), format_number(c.J_gamma_alpha),
                       format_number(c.J_alpha), format_number(std::max(0.0, c.J_alpha))});
    }
    return table;
}

}  // namespace fieldroad
