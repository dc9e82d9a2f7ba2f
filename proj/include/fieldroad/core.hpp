#pragma once

// Closed-form evaluation of the field-road fundamental solution
//
//   phi*(x, y, t) = min_{s >= 0} f(s; x, y, t),
//   f(s; x, y, t) = (-x + b s + c t)^2 / (4 (t + a s)) + (y + s)^2 / (4 t),
//
// together with the payoff J = phi* - t and the value v = max{0, J}.
// f is strictly convex in s, so the minimizer s* is unique. s* = 0 exactly
// on the set y >= (a / 2t)(x - ct)^2 + b (x - ct) (Rectilinear regime);
// elsewhere s* > 0 is the unique root of f_s (RoadAssisted regime).

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fieldroad {

/// Model coefficients: a road diffusivity, b road drift, c field advection.
struct Params {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;

    /// The structural theorems (convexity, rotational monotonicity) assume
    /// b > 0 and c > 0. Formulas still evaluate outside that range.
    bool in_theorem_scope() const noexcept { return b > 0.0 && c > 0.0; }

    friend bool operator==(const Params&, const Params&) = default;
};

/// Throws DomainError unless a > 0 and all coefficients are finite.
void validate(const Params& params);

struct SpaceTimePoint {
    double x = 0.0;
    double y = 0.0;
    double t = 1.0;

    friend bool operator==(const SpaceTimePoint&, const SpaceTimePoint&) = default;
};

/// Throws DomainError unless y >= 0, t > 0 and all coordinates are finite.
void validate(const SpaceTimePoint& p);

enum class Regime { Rectilinear, RoadAssisted };

std::string to_string(Regime regime);

struct Evaluation {
    double s_star = 0.0;
    double phi_star = 0.0;
    double J = 0.0;
    double v = 0.0;
    Regime regime = Regime::Rectilinear;
    bool outside_theorem_scope = false;
};

namespace tolerance {
inline constexpr double root = 1e-12;      // |f_s(s*)| target
inline constexpr double classify = 1e-12;  // on y - critical_boundary_y, ties -> Rectilinear
inline constexpr double cross = 1e-8;      // relative agreement of independent routes
}  // namespace tolerance

double objective(const Params& params, const SpaceTimePoint& p, double s);

struct ObjectiveDerivatives {
    double f_s = 0.0;
    double f_ss = 0.0;
};

ObjectiveDerivatives objective_derivatives(const Params& params, const SpaceTimePoint& p, double s);

/// (a / 2t)(x - ct)^2 + b (x - ct). Negative values mean the whole fiber
/// y >= 0 at this x is Rectilinear.
double critical_boundary_y(const Params& params, double x, double t);

/// Classification from the curve inequality alone.
Regime classify(const Params& params, const SpaceTimePoint& p);

/// Sign-change bracket [lo, hi] of f_s with f_s(lo) < 0 < f_s(hi). Only
/// meaningful for RoadAssisted points; throws BracketError when the
/// doubling search exceeds its cap.
struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
};

RootBracket bracket_minimizer(const Params& params, const SpaceTimePoint& p);

Evaluation solve_minimizer(const Params& params, const SpaceTimePoint& p);

/// Coefficients of 2a^2 s^3 + c2 s^2 + c1 s + c0 = 0, which equals
/// 4 t (t + a s)^2 f_s(s) and so shares its sign on s >= 0.
struct CubicCoefficients {
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double s) const noexcept { return ((c3 * s + c2) * s + c1) * s + c0; }
    double derivative(double s) const noexcept { return (3.0 * c3 * s + 2.0 * c2) * s + c1; }
};

CubicCoefficients cubic_coefficients(const Params& params, const SpaceTimePoint& p);

/// Nonnegative root of the minimizer cubic by safeguarded Newton. Returns 0
/// when the constant term is >= 0 (no positive root). Throws
/// InconsistencyError if the root disagrees with solve_minimizer beyond
/// tolerance::cross.
double minimizer_via_cubic(const Params& params, const SpaceTimePoint& p);

struct PointError {
    std::size_t index = 0;
    std::string kind;
    std::string message;
};

using EvalOutcome = std::variant<Evaluation, PointError>;

/// Element-wise solve_minimizer. A failing point yields a PointError in its
/// slot and does not abort the batch.
std::vector<EvalOutcome> evaluate(const Params& params, std::span<const SpaceTimePoint> points);

struct HomogeneityResidual {
    double phi = 0.0;  // |phi*(lx, ly, l) - l phi*(x, y, 1)|
    double s = 0.0;    // |s*(lx, ly, l) - l s*(x, y, 1)|
};

HomogeneityResidual homogeneity_check(const Params& params, const SpaceTimePoint& unit_point,
                                      double lambda);

/// Legendre transforms of H(p) = |p|^2 + c p1 + 1 and B(p1) = a p1^2 + b p1.
struct LegendreForms {
    double L = 0.0;
    double G = 0.0;
};

LegendreForms legendre_forms(const Params& params, std::array<double, 2> q);

}  // namespace fieldroad
