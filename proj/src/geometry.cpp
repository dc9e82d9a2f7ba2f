#include "fieldroad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "fieldroad/errors.hpp"
#include "fieldroad/parallel.hpp"

namespace fieldroad {

namespace {

using Point = std::array<double, 2>;

// Edge keys: horizontal edge from node (i, j) to (i + 1, j) is 2 * node,
// vertical edge from (i, j) to (i, j + 1) is 2 * node + 1.
std::size_t horizontal_key(const GridSpec& g, std::size_t i, std::size_t j) {
    return 2 * (j * g.nx + i);
}
std::size_t vertical_key(const GridSpec& g, std::size_t i, std::size_t j) {
    return 2 * (j * g.nx + i) + 1;
}

struct Segment {
    std::size_t from;
    std::size_t to;
};

Point crossing(Point pa, double va, Point pb, double vb, double level) {
    const double w = (level - va) / (vb - va);
    return {pa[0] + w * (pb[0] - pa[0]), pa[1] + w * (pb[1] - pa[1])};
}

double cross(const Point& u, const Point& v) { return u[0] * v[1] - u[1] * v[0]; }

Point minus(const Point& p, const Point& q) { return {p[0] - q[0], p[1] - q[1]}; }

double norm2(const Point& p) { return p[0] * p[0] + p[1] * p[1]; }

void push_distinct(std::vector<Point>& out, const Point& p) {
    if (out.empty() || out.back() != p) out.push_back(p);
}

Params resolve(const PartialParams& fixed, const std::string& varying, double value) {
    Params p;
    if (varying == "b") {
        if (!fixed.a || !fixed.c) throw ConfigError("sweep over b needs fixed a and c");
        p = {*fixed.a, value, *fixed.c};
    } else if (varying == "c") {
        if (!fixed.a || !fixed.b) throw ConfigError("sweep over c needs fixed a and b");
        p = {*fixed.a, *fixed.b, value};
    } else {
        throw ConfigError("sweep parameter must be b or c, got '" + varying + "'");
    }
    if (!(value > 0.0)) throw ConfigError("sweep values must be positive");
    validate(p);
    return p;
}

}  // namespace

ScalarField eval_field(const Params& params, const GridSpec& spec, double t) {
    validate(spec);
    validate(params);
    if (!(t > 0.0)) throw DomainError("eval_field requires t > 0");
    ScalarField field(spec, Quantity::PhiStar);
    std::vector<std::vector<PoisonedCell>> row_faults(spec.ny);
    parallel_for(spec.ny, [&](std::size_t j) {
        const double y = spec.y(j);
        for (std::size_t i = 0; i < spec.nx; ++i) {
            try {
                field.at(i, j) = solve_minimizer(params, {spec.x(i), y, t}).phi_star;
            } catch (const Error& e) {
                field.at(i, j) = std::numeric_limits<double>::quiet_NaN();
                row_faults[j].push_back({i, j, e.kind(), e.what()});
            }
        }
    });
    for (auto& faults : row_faults) {
        for (auto& f : faults) field.poisoned.push_back(std::move(f));
    }
    return field;
}

std::vector<ContourPolyline> extract_contour(const ScalarField& field, double level,
                                             const CenterProbe& probe, const EdgeRoot& edge_root) {
    const auto& g = field.spec;
    validate(g);
    if (field.values.size() != g.size()) throw DomainError("field size does not match its grid");
    for (double v : field.values) {
        if (!std::isfinite(v)) throw DomainError("extract_contour requires a finite field");
    }

    std::unordered_map<std::size_t, Point> where;
    std::vector<Segment> segments;

    auto node = [&](std::size_t i, std::size_t j) { return Point{g.x(i), g.y(j)}; };
    auto edge_point = [&](std::size_t key) -> std::size_t {
        if (where.contains(key)) return key;
        const std::size_t n = key / 2;
        const std::size_t i = n % g.nx;
        const std::size_t j = n / g.nx;
        const std::size_t i2 = key % 2 == 0 ? i + 1 : i;
        const std::size_t j2 = key % 2 == 0 ? j : j + 1;
        const Point pa = node(i, j);
        const Point pb = node(i2, j2);
        where[key] = edge_root ? edge_root(pa, field.at(i, j), pb, field.at(i2, j2))
                               : crossing(pa, field.at(i, j), pb, field.at(i2, j2), level);
        return key;
    };

    for (std::size_t j = 0; j + 1 < g.ny; ++j) {
        for (std::size_t i = 0; i + 1 < g.nx; ++i) {
            const bool in0 = field.at(i, j) < level;
            const bool in1 = field.at(i + 1, j) < level;
            const bool in2 = field.at(i + 1, j + 1) < level;
            const bool in3 = field.at(i, j + 1) < level;
            const std::size_t e0 = horizontal_key(g, i, j);
            const std::size_t e1 = vertical_key(g, i + 1, j);
            const std::size_t e2 = horizontal_key(g, i, j + 1);
            const std::size_t e3 = vertical_key(g, i, j);

            std::vector<std::size_t> crossed;
            if (in0 != in1) crossed.push_back(e0);
            if (in1 != in2) crossed.push_back(e1);
            if (in3 != in2) crossed.push_back(e2);
            if (in0 != in3) crossed.push_back(e3);
            if (crossed.empty()) continue;
            for (std::size_t key : crossed) edge_point(key);

            if (crossed.size() == 2) {
                segments.push_back({crossed[0], crossed[1]});
                continue;
            }
            // Saddle: in0 == in2 != in1 == in3.
            const double cx = 0.5 * (g.x(i) + g.x(i + 1));
            const double cy = 0.5 * (g.y(j) + g.y(j + 1));
            const double center =
                probe ? probe(cx, cy)
                      : 0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i + 1, j + 1) +
                                field.at(i, j + 1));
            if ((center < level) == in0) {
                segments.push_back({e0, e1});
                segments.push_back({e2, e3});
            } else {
                segments.push_back({e0, e3});
                segments.push_back({e1, e2});
            }
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> incident;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        incident[segments[k].from].push_back(k);
        incident[segments[k].to].push_back(k);
    }
    std::vector<bool> used(segments.size(), false);

    auto walk = [&](std::size_t start_key) {
        std::vector<Point> pts{where[start_key]};
        std::size_t key = start_key;
        for (;;) {
            std::size_t next_seg = segments.size();
            for (std::size_t s : incident[key]) {
                if (!used[s]) {
                    next_seg = s;
                    break;
                }
            }
            if (next_seg == segments.size()) break;
            used[next_seg] = true;
            const auto& seg = segments[next_seg];
            key = seg.from == key ? seg.to : seg.from;
            push_distinct(pts, where[key]);
            if (key == start_key) break;
        }
        return pts;
    };

    std::vector<ContourPolyline> out;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (used[k]) continue;
        for (std::size_t end : {segments[k].from, segments[k].to}) {
            if (incident[end].size() == 1 && !used[k]) {
                ContourPolyline poly;
                poly.vertices = walk(end);
                poly.closed_by_boundary = true;
                out.push_back(std::move(poly));
            }
        }
    }
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (used[k]) continue;
        ContourPolyline poly;
        poly.vertices = walk(segments[k].from);
        if (poly.vertices.size() > 1 && poly.vertices.front() == poly.vertices.back()) {
            poly.vertices.pop_back();
        }
        poly.closed_by_boundary = false;
        out.push_back(std::move(poly));
    }
    return out;
}

std::vector<ContourPolyline> extract_phi_contour(const Params& params, const ScalarField& field,
                                                 double t, double level, EdgePlacement placement) {
    auto phi = [&](double x, double y) {
        return solve_minimizer(params, {x, y, t}).phi_star;
    };
    EdgeRoot exact;
    if (placement == EdgePlacement::ExactRoot) {
        exact = [&](const Point& pa, double va, const Point& pb, double) {
            // Bracket [0, 1] in the edge parameter; inside (< level) at the lo end.
            const bool a_inside = va < level;
            double lo = 0.0;
            double hi = 1.0;
            for (int k = 0; k < 60; ++k) {
                const double mid = 0.5 * (lo + hi);
                const bool in = phi(pa[0] + mid * (pb[0] - pa[0]), pa[1] + mid * (pb[1] - pa[1])) < level;
                (in == a_inside ? lo : hi) = mid;
            }
            const double w = 0.5 * (lo + hi);
            return Point{pa[0] + w * (pb[0] - pa[0]), pa[1] + w * (pb[1] - pa[1])};
        };
    }
    return extract_contour(field, level, phi, exact);
}

ConvexityReport convexity_audit(const ContourPolyline& polyline, const ConvexityTolerances& tol) {
    const auto& v = polyline.vertices;
    if (v.size() < 3) throw DomainError("convexity_audit needs at least three vertices");

    std::vector<std::size_t> keep{0};
    const double merge2 = tol.merge * tol.merge;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (norm2(minus(v[k], v[keep.back()])) >= merge2) {
            keep.push_back(k);
        } else if (k + 1 == v.size() && polyline.closed_by_boundary && keep.size() > 1) {
            keep.back() = k;  // open ends stay on the boundary
        }
    }
    if (!polyline.closed_by_boundary && keep.size() > 1 &&
        norm2(minus(v[keep.front()], v[keep.back()])) < merge2) {
        keep.pop_back();
    }

    ConvexityReport report;
    report.n_merged = v.size() - keep.size();
    const std::size_t n = keep.size();
    if (n < 3) throw DomainError("convexity_audit: fewer than three vertices after merging");

    struct Turn {
        std::size_t vertex;
        double cross;
        double scale;
    };
    std::vector<Turn> turns;
    const bool loop = !polyline.closed_by_boundary;
    const std::size_t first = loop ? 0 : 1;
    const std::size_t last = loop ? n : n - 1;
    for (std::size_t k = first; k < last; ++k) {
        const auto& prev = v[keep[(k + n - 1) % n]];
        const auto& here = v[keep[k]];
        const auto& next = v[keep[(k + 1) % n]];
        const Point e1 = minus(here, prev);
        const Point e2 = minus(next, here);
        turns.push_back({keep[k], cross(e1, e2), std::max(norm2(e1), norm2(e2))});
    }
    report.n_turns = turns.size();

    double total = 0.0;
    for (const auto& turn : turns) total += turn.cross;
    report.orientation = total > 0.0 ? 1 : (total < 0.0 ? -1 : 0);
    if (report.orientation == 0) return report;

    for (const auto& turn : turns) {
        const double excess = -report.orientation * turn.cross - tol.curvature * turn.scale;
        if (excess > report.worst_excess) {
            report.worst_excess = excess;
            report.violating_vertex = turn.vertex;
        }
    }
    report.passed = !report.violating_vertex.has_value();
    return report;
}

RotationalProfile rotational_profile(const Params& params, double r, double t,
                                     std::size_t n_theta, double tolerance) {
    validate(params);
    if (!params.in_theorem_scope()) {
        throw DomainError("rotational monotonicity is only certified for b > 0 and c > 0");
    }
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("rotational_profile requires r >= 0");
    if (!(t > 0.0)) throw DomainError("rotational_profile requires t > 0");
    if (n_theta < 2) throw DomainError("rotational_profile needs at least two angles");

    RotationalProfile prof;
    prof.r = r;
    prof.t = t;
    for (std::size_t k = 0; k < n_theta; ++k) {
        const double theta =
            0.5 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_theta - 1);
        prof.theta.push_back(theta);
        const double y = std::max(0.0, r * std::sin(theta));
        prof.phi.push_back(solve_minimizer(params, {r * std::cos(theta), y, t}).phi_star);
    }
    for (std::size_t k = 0; k + 1 < n_theta; ++k) {
        prof.max_violation = std::max(prof.max_violation, prof.phi[k] - prof.phi[k + 1]);
    }
    prof.nondecreasing = prof.max_violation <= tolerance;
    return prof;
}

double road_extent(const Params& params, double t) {
    if (!(t > 0.0)) throw DomainError("road_extent requires t > 0");
    auto inside = [&](double x) { return solve_minimizer(params, {x, 0.0, t}).phi_star < t; };
    double lo = params.c * t;
    double step = std::max(1.0, t);
    double hi = lo + step;
    for (int k = 0; inside(hi); ++k) {
        if (k > 64) throw BracketError("road extent not bracketed");
        lo = hi;
        step *= 2.0;
        hi = lo + step;
    }
    for (int k = 0; k < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi);
         ++k) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return lo;
}

std::vector<SweepEntry> sweep_figure2(const PartialParams& fixed, const std::string& varying,
                                      const std::vector<double>& values, const GridSpec& spec,
                                      double level, EdgePlacement placement) {
    validate(spec);
    std::vector<SweepEntry> out;
    for (double value : values) {
        SweepEntry entry;
        entry.value = value;
        entry.params = resolve(fixed, varying, value);
        const auto field = eval_field(entry.params, spec, 1.0);
        entry.contours = extract_phi_contour(entry.params, field, 1.0, level, placement);
        if (entry.contours.empty()) {
            throw DomainError("level " + format_number(level) + " is not crossed in the window for " +
                              varying + " = " + format_number(value));
        }
        entry.x_max = -std::numeric_limits<double>::infinity();
        for (const auto& poly : entry.contours) {
            for (const auto& p : poly.vertices) {
                entry.x_max = std::max(entry.x_max, p[0]);
                if (p[0] <= spec.x_min || p[0] >= spec.x_max || p[1] >= spec.y_max) {
                    entry.touches_window = true;
                }
            }
        }
        entry.road_extent = road_extent(entry.params, 1.0);
        out.push_back(std::move(entry));
    }
    return out;
}

void append_contours(CsvTable& table, const std::string& param_name, double param_value,
                     const std::vector<ContourPolyline>& polylines) {
    for (std::size_t id = 0; id < polylines.size(); ++id) {
        const auto& verts = polylines[id].vertices;
        for (std::size_t k = 0; k < verts.size(); ++k) {
            table.add_row({param_name, format_number(param_value), std::to_string(id),
                           std::to_string(k), format_number(verts[k][0]),
                           format_number(verts[k][1])});
        }
    }
}

CsvTable contour_table(const std::string& param_name, double param_value,
                       const std::vector<ContourPolyline>& polylines) {
    CsvTable table;
    table.header = {"param_name", "param_value", "polyline_id", "vertex_index", "x", "y"};
    append_contours(table, param_name, param_value, polylines);
    return table;
}

CsvTable field_table(const ScalarField& field) {
    CsvTable table;
    table.header = {"x", "y", "value"};
    const auto& g = field.spec;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            table.add_row({format_number(g.x(i)), format_number(g.y(j)), format_number(field.at(i, j))});
        }
    }
    return table;
}

}  // namespace fieldroad
