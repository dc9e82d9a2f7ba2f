#pragma once

// Level-set geometry of the invaded set Omega = {phi*(., ., 1) < 1}:
// grid sampling, marching-squares contours, and the convexity and
// rotational-monotonicity audits.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fieldroad/core.hpp"
#include "fieldroad/csv.hpp"
#include "fieldroad/grid.hpp"

namespace fieldroad {

/// phi*(x_i, y_j, t) on every node, rows evaluated in parallel. Failed
/// nodes are NaN and recorded in ScalarField::poisoned.
ScalarField eval_field(const Params& params, const GridSpec& spec, double t);

struct ContourPolyline {
    std::vector<std::array<double, 2>> vertices;
    /// True when both ends lie on the window boundary; false for a loop
    /// (the last vertex then connects back to the first).
    bool closed_by_boundary = false;
};

/// Value used to disambiguate saddle cells, evaluated at the cell center.
using CenterProbe = std::function<double(double x, double y)>;

/// Locates the level crossing on the grid edge from pa (value va) to pb (value vb).
using EdgeRoot = std::function<std::array<double, 2>(const std::array<double, 2>& pa, double va,
                                                     const std::array<double, 2>& pb, double vb)>;

/// Marching squares. Nodes with value < level are inside. Crossings are
/// linearly interpolated along cell edges unless `edge_root` is given.
/// Saddle cells consult `probe` at the cell center (the mean of the four
/// corners when no probe is given). Throws DomainError on non-finite
/// samples. An uncrossed level gives an empty list.
std::vector<ContourPolyline> extract_contour(const ScalarField& field, double level,
                                             const CenterProbe& probe = {},
                                             const EdgeRoot& edge_root = {});

enum class EdgePlacement { Linear, ExactRoot };

/// extract_contour on a phi* field with saddles resolved by exact phi*.
/// ExactRoot bisects phi* along each crossed edge instead of interpolating;
/// the vertices stay on the same grid edges.
std::vector<ContourPolyline> extract_phi_contour(const Params& params, const ScalarField& field,
                                                 double t, double level,
                                                 EdgePlacement placement = EdgePlacement::Linear);

struct ConvexityReport {
    bool passed = false;
    int orientation = 0;  // +1 counterclockwise, -1 clockwise, 0 undetermined
    std::size_t n_turns = 0;
    std::size_t n_merged = 0;  // vertices dropped by the short-edge merge
    std::optional<std::size_t> violating_vertex;  // index into the input polyline
    double worst_excess = 0.0;  // largest wrong-sign cross product beyond tolerance
};

struct ConvexityTolerances {
    double curvature = 1e-3;  // wrong-sign cross below curvature * |edge|^2 is noise
    double merge = 0.0;       // drop vertices closer than this to the previous kept one
};

/// Signed cross products of consecutive edges must share one sign. For a
/// boundary-closed polyline the closing chord is not audited. Throws
/// DomainError for fewer than three vertices.
ConvexityReport convexity_audit(const ContourPolyline& polyline,
                                const ConvexityTolerances& tol = {});

struct RotationalProfile {
    double r = 0.0;
    double t = 1.0;
    std::vector<double> theta;
    std::vector<double> phi;
    double max_violation = 0.0;  // max_k max(0, phi_k - phi_{k+1})
    bool nondecreasing = false;
};

/// phi*(r cos theta, r sin theta, t) on n_theta uniform angles over [0, pi/2].
/// Throws DomainError outside the theorem scope (b <= 0 or c <= 0).
RotationalProfile rotational_profile(const Params& params, double r, double t,
                                     std::size_t n_theta, double tolerance = 1e-10);

/// Largest x with phi*(x, 0, t) < t, by bisection on the road.
double road_extent(const Params& params, double t = 1.0);

struct SweepEntry {
    double value = 0.0;
    Params params;
    std::vector<ContourPolyline> contours;
    double x_max = 0.0;        // rightmost contour vertex
    double road_extent = 0.0;
    bool touches_window = false;  // a contour reaches a window edge other than y = y_min
};

struct PartialParams {
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> c;
};

/// For each value of `varying` ("b" or "c"), samples phi*(., ., 1), extracts
/// the level-1 contour and records the two extents.
std::vector<SweepEntry> sweep_figure2(const PartialParams& fixed, const std::string& varying,
                                      const std::vector<double>& values, const GridSpec& spec,
                                      double level = 1.0,
                                      EdgePlacement placement = EdgePlacement::Linear);

/// Header: param_name,param_value,polyline_id,vertex_index,x,y
CsvTable contour_table(const std::string& param_name, double param_value,
                       const std::vector<ContourPolyline>& polylines);
void append_contours(CsvTable& table, const std::string& param_name, double param_value,
                     const std::vector<ContourPolyline>& polylines);

/// Header: x,y,value
CsvTable field_table(const ScalarField& field);

}  // namespace fieldroad
