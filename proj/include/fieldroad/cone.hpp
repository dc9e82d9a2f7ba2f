#pragma once

// Two roads bounding a cone: Gamma_0 is the positive x-axis, Gamma_alpha the
// ray at polar angle 2 alpha. The field has no advection. Each road sees the
// half-plane payoff of its own (a, b); the cone payoff takes the smaller of
// the Gamma_0 payoff at p and the Gamma_alpha payoff at the reflection of p.

#include <array>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fieldroad/core.hpp"
#include "fieldroad/csv.hpp"

namespace fieldroad {

struct RoadParams {
    double a = 1.0;  // road diffusivity
    double b = 1.0;  // road drift

    friend bool operator==(const RoadParams&, const RoadParams&) = default;
};

struct ConeConfig {
    double alpha = 0.25 * std::numbers::pi;  // cone opening is 2 alpha
    RoadParams road0;
    RoadParams road_alpha;
    double field_advection = 0.0;

    friend bool operator==(const ConeConfig&, const ConeConfig&) = default;
};

/// Throws ConfigError unless 0 < alpha <= pi/2, both a > 0, all values
/// finite and field_advection == 0.
void validate(const ConeConfig& cfg);

/// Reflection across the bisector ray at angle alpha:
/// (x, y) -> (x cos 2a + y sin 2a, x sin 2a - y cos 2a).
std::array<double, 2> psi_alpha(const ConeConfig& cfg, const std::array<double, 2>& pt);

bool inside_cone(const ConeConfig& cfg, const std::array<double, 2>& pt);

/// phi* - t with field advection 0 and the given road.
double payoff_J_halfplane(const RoadParams& road, const SpaceTimePoint& p);

struct ConePayoff {
    double J_gamma0 = 0.0;       // road0 payoff at p
    double J_gamma_alpha = 0.0;  // road_alpha payoff at psi_alpha(p)
    double J_alpha = 0.0;        // min of the two
};

/// Throws DomainError when p lies outside the closed cone.
ConePayoff cone_payoff(const ConeConfig& cfg, const SpaceTimePoint& p);
double payoff_J_alpha(const ConeConfig& cfg, const SpaceTimePoint& p);

/// Which points the admissibility check compares at radius r.
/// Reflected: road_alpha payoff at psi_alpha of the Gamma_alpha point, i.e. at (r, 0).
/// Literal: road_alpha payoff at the unreflected Gamma_alpha point (r cos 2a, r sin 2a).
enum class Theorem5Form { Reflected, Literal };

struct Theorem5Report {
    Theorem5Form form = Theorem5Form::Reflected;
    std::vector<double> r;
    std::vector<double> lhs;  // road_alpha side
    std::vector<double> rhs;  // road0 payoff at (1, r, 0)
    double max_violation = 0.0;  // max(0, lhs - rhs)
    double max_abs_gap = 0.0;    // max |lhs - rhs|
    bool passed = false;
};

/// Samples r uniformly on [0, r_max] (n_samples >= 2) at t = 1 and checks
/// lhs <= rhs up to tolerance * (1 + |rhs|).
Theorem5Report theorem5_condition(const ConeConfig& cfg, double r_max, std::size_t n_samples,
                                  Theorem5Form form = Theorem5Form::Reflected,
                                  double tolerance = 1e-12);

struct WAlphaValue {
    double value = 0.0;
    bool condition_verified = false;
    std::string warning;  // set when the value was produced under override
};

/// max{0, J_alpha}. Requires a passing condition report unless
/// override_unverified is set, in which case the result carries a warning.
/// Throws DomainError otherwise.
WAlphaValue value_w_alpha(const ConeConfig& cfg, const SpaceTimePoint& p,
                          const Theorem5Report* condition, bool override_unverified = false);

/// Header: x,y,t,J_gamma0,J_gamma_alpha,J_alpha,w_alpha
CsvTable cone_table(const ConeConfig& cfg, const std::vector<SpaceTimePoint>& points);

}  // namespace fieldroad
