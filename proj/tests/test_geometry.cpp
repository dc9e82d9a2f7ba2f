#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fieldroad/errors.hpp"
#include "fieldroad/geometry.hpp"

using namespace fieldroad;

namespace {

const Params kTwos{2.0, 2.0, 2.0};

GridSpec window(double x0, double x1, double y0, double y1, std::size_t nx, std::size_t ny) {
    GridSpec g;
    g.x_min = x0;
    g.x_max = x1;
    g.y_min = y0;
    g.y_max = y1;
    g.nx = nx;
    g.ny = ny;
    return g;
}

ScalarField sampled(const GridSpec& g, double (*fn)(double, double)) {
    ScalarField f(g, Quantity::PdeIterate);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) f.at(i, j) = fn(g.x(i), g.y(j));
    return f;
}

Params random_admissible(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coef(0.2, 5.0);
    return {coef(rng), coef(rng), coef(rng)};
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_NOTHROW(validate(GridSpec{}));
    CHECK_THROWS_AS(validate(window(1, 0, 0, 1, 4, 4)), ConfigError);
    CHECK_THROWS_AS(validate(window(0, 1, -0.5, 1, 4, 4)), ConfigError);
    CHECK_THROWS_AS(validate(window(0, 1, 1, 1, 4, 4)), ConfigError);
    CHECK_THROWS_AS(validate(window(0, 1, 0, 1, 1, 4)), ConfigError);
    const GridSpec g = window(-1, 1, 0, 2, 5, 3);
    CHECK(g.dx() == 0.5);
    CHECK(g.dy() == 1.0);
    CHECK(g.x(4) == 1.0);
}

TEST_CASE("eval_field on a 2x2 grid around (ct, 0)") {
    const auto f = eval_field(kTwos, window(2.0, 3.0, 0.0, 1.0, 2, 2), 1.0);
    CHECK(f.at(0, 0) == 0.0);
    for (double v : f.values) CHECK(v >= 0.0);
    CHECK(f.poisoned.empty());
    CHECK(f.quantity == Quantity::PhiStar);
}

TEST_CASE("eval_field minimum sits at (c, 0) on the fixture grid") {
    const GridSpec g;  // [-5,25] x [0,12], 800 x 400
    const auto f = eval_field(kTwos, g, 1.0);
    std::size_t best = 0;
    for (std::size_t k = 1; k < f.values.size(); ++k) {
        if (f.values[k] < f.values[best]) best = k;
    }
    const double x = g.x(best % g.nx);
    const double y = g.y(best / g.nx);
    CHECK(std::abs(x - 2.0) <= g.dx());
    CHECK(std::abs(y) <= g.dy());
    for (double v : f.values) CHECK(v >= 0.0);
}

TEST_CASE("eval_field rejects bad input") {
    CHECK_THROWS_AS(eval_field(kTwos, GridSpec{}, 0.0), DomainError);
    CHECK_THROWS_AS(eval_field({0.0, 1.0, 1.0}, GridSpec{}, 1.0), DomainError);
}

TEST_CASE("extract_contour: constant field gives nothing") {
    ScalarField f(window(0, 1, 0, 1, 8, 8), Quantity::V, 3.0);
    CHECK(extract_contour(f, 1.0).empty());
    CHECK(extract_contour(f, 5.0).empty());
}

TEST_CASE("extract_contour rejects non-finite samples") {
    ScalarField f(window(0, 1, 0, 1, 4, 4), Quantity::V, 0.0);
    f.at(2, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(extract_contour(f, 1.0), DomainError);
}

TEST_CASE("extract_contour: quarter circle of x^2 + y^2") {
    const auto g = window(0.0, 1.5, 0.0, 1.5, 61, 61);
    const auto f = sampled(g, [](double x, double y) { return x * x + y * y; });
    const auto polys = extract_contour(f, 1.0);
    REQUIRE(polys.size() == 1);
    const auto& poly = polys[0];
    CHECK(poly.closed_by_boundary);
    CHECK(poly.vertices.size() > 50);
    for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
        const auto& v = poly.vertices[k];
        CHECK(std::abs(std::hypot(v[0], v[1]) - 1.0) <= g.dx());
        if (k > 0) CHECK(v != poly.vertices[k - 1]);
    }
    const auto report = convexity_audit(poly);
    CHECK(report.passed);
    CHECK(report.orientation != 0);
}

TEST_CASE("extract_contour: interior loop is closed on itself") {
    const auto g = window(-2.0, 2.0, 0.0, 4.0, 41, 41);
    const auto f = sampled(g, [](double x, double y) { return x * x + (y - 2.0) * (y - 2.0); });
    const auto polys = extract_contour(f, 1.0);
    REQUIRE(polys.size() == 1);
    CHECK_FALSE(polys[0].closed_by_boundary);
    CHECK(polys[0].vertices.front() != polys[0].vertices.back());
    CHECK(convexity_audit(polys[0]).passed);
}

TEST_CASE("extract_contour: saddle resolved by the center probe") {
    // Corners (0,0),(1,1) inside, (1,0),(0,1) outside.
    ScalarField f(window(0, 1, 0, 1, 2, 2), Quantity::PdeIterate);
    f.at(0, 0) = 0.0;
    f.at(1, 1) = 0.0;
    f.at(1, 0) = 2.0;
    f.at(0, 1) = 2.0;
    const auto joined = extract_contour(f, 1.0, [](double, double) { return 0.0; });
    const auto split = extract_contour(f, 1.0, [](double, double) { return 2.0; });
    REQUIRE(joined.size() == 2);
    REQUIRE(split.size() == 2);
    // Center inside: the two cut-off corners are the outside ones.
    auto touches = [](const ContourPolyline& p, double x, double y) {
        for (const auto& v : p.vertices)
            if (std::abs(v[0] - x) + std::abs(v[1] - y) < 0.51) return true;
        return false;
    };
    CHECK((touches(joined[0], 1, 0) || touches(joined[0], 0, 1)));
    CHECK((touches(split[0], 0, 0) || touches(split[0], 1, 1)));
}

TEST_CASE("contour fidelity on phi* with level 1") {
    const auto g = window(-5.0, 25.0, 0.0, 12.0, 200, 100);
    const auto f = eval_field(kTwos, g, 1.0);
    const auto polys = extract_phi_contour(kTwos, f, 1.0, 1.0);
    REQUIRE_FALSE(polys.empty());
    const double bound = std::max(1e-6, g.dx() * g.dx());
    for (const auto& poly : polys) {
        for (const auto& v : poly.vertices) {
            CHECK(v[0] >= g.x_min);
            CHECK(v[0] <= g.x_max);
            CHECK(std::abs(solve_minimizer(kTwos, {v[0], v[1], 1.0}).phi_star - 1.0) <= bound);
        }
    }
    const auto exact = extract_phi_contour(kTwos, f, 1.0, 1.0, EdgePlacement::ExactRoot);
    REQUIRE(exact.size() == polys.size());
    for (const auto& v : exact[0].vertices) {
        CHECK(std::abs(solve_minimizer(kTwos, {v[0], v[1], 1.0}).phi_star - 1.0) <= 1e-12);
    }
}

TEST_CASE("convexity_audit flags a synthetic inflection") {
    ContourPolyline poly;
    poly.closed_by_boundary = true;
    for (int k = 0; k <= 40; ++k) {
        const double th = std::numbers::pi * k / 40.0;
        poly.vertices.push_back({std::cos(th), std::sin(th)});
    }
    REQUIRE(convexity_audit(poly).passed);
    // Push vertex 20 inward past its neighbours' chord.
    poly.vertices[20] = {0.0, 0.9};
    const auto report = convexity_audit(poly);
    CHECK_FALSE(report.passed);
    REQUIRE(report.violating_vertex.has_value());
    CHECK(*report.violating_vertex == 20);
}

TEST_CASE("convexity_audit rejects degenerate polylines") {
    ContourPolyline poly;
    poly.vertices = {{0, 0}, {1, 0}};
    CHECK_THROWS_AS(convexity_audit(poly), DomainError);
}

TEST_CASE("convexity_audit merge drops near-duplicate vertices") {
    ContourPolyline poly;
    poly.closed_by_boundary = true;
    for (int k = 0; k <= 20; ++k) {
        const double th = std::numbers::pi * k / 20.0;
        poly.vertices.push_back({std::cos(th), std::sin(th)});
        if (k == 10) poly.vertices.push_back({std::cos(th) - 1e-9, std::sin(th) + 1e-7});
    }
    const auto report = convexity_audit(poly, {1e-3, 1e-4});
    CHECK(report.n_merged == 1);
    CHECK(report.passed);
}

TEST_CASE("reference fixture contour is convex") {
    const Params p{2.0, 2.0, 5.0};
    const auto f = eval_field(p, GridSpec{}, 1.0);
    const auto polys = extract_phi_contour(p, f, 1.0, 1.0, EdgePlacement::ExactRoot);
    REQUIRE(polys.size() == 1);
    CHECK(polys[0].closed_by_boundary);
    CHECK(convexity_audit(polys[0]).passed);
}

TEST_CASE("property: exact-root level-1 contours are convex for 20 random triples") {
    std::mt19937_64 rng(20);
    for (int k = 0; k < 20; ++k) {
        const Params p = random_admissible(rng);
        const auto f = eval_field(p, GridSpec{}, 1.0);
        const auto polys = extract_phi_contour(p, f, 1.0, 1.0, EdgePlacement::ExactRoot);
        REQUIRE(polys.size() == 1);
        const auto report = convexity_audit(polys[0]);
        CHECK_MESSAGE(report.passed, "a=" << p.a << " b=" << p.b << " c=" << p.c);
    }
}

TEST_CASE("rotational profile") {
    SUBCASE("r = 0 is constant") {
        const auto prof = rotational_profile(kTwos, 0.0, 1.0, 16);
        for (double v : prof.phi) CHECK(v == prof.phi[0]);
        CHECK(prof.nondecreasing);
    }
    SUBCASE("fixture r = 3") {
        const auto prof = rotational_profile(kTwos, 3.0, 1.0, 64);
        CHECK(prof.theta.size() == 64);
        CHECK(prof.theta.back() == doctest::Approx(std::numbers::pi / 2));
        CHECK(prof.nondecreasing);
        CHECK(prof.max_violation <= 1e-10);
    }
    SUBCASE("outside theorem scope") {
        CHECK_THROWS_AS(rotational_profile({2.0, -1.0, 2.0}, 3.0, 1.0, 8), DomainError);
        CHECK_THROWS_AS(rotational_profile({2.0, 1.0, 0.0}, 3.0, 1.0, 8), DomainError);
        CHECK_THROWS_AS(rotational_profile(kTwos, -1.0, 1.0, 8), DomainError);
    }
}

TEST_CASE("property: rotational monotonicity on random (r, t)") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> rr(0.0, 20.0);
    std::uniform_real_distribution<double> tt(0.1, 5.0);
    for (int k = 0; k < 10; ++k) {
        const Params p = random_admissible(rng);
        for (int m = 0; m < 50; ++m) {
            const auto prof = rotational_profile(p, rr(rng), tt(rng), 64);
            CHECK(prof.max_violation <= 1e-10);
            CHECK(prof.phi.back() >= prof.phi.front());
        }
    }
}

TEST_CASE("road extent is the right end of {phi*(., 0, 1) < 1}") {
    const double x = road_extent(kTwos);
    CHECK(solve_minimizer(kTwos, {x, 0.0, 1.0}).phi_star < 1.0);
    CHECK(solve_minimizer(kTwos, {x + 1e-9, 0.0, 1.0}).phi_star >= 1.0);
}

TEST_CASE("parameter sweeps move the invaded set") {
    const GridSpec g = window(-5.0, 25.0, 0.0, 12.0, 300, 120);
    PartialParams left;
    left.a = 2.0;
    left.b = 2.0;
    const auto by_c = sweep_figure2(left, "c", {1.0, 10.0}, g);
    CHECK(by_c[1].x_max > by_c[0].x_max);

    PartialParams right;
    right.a = 2.0;
    right.c = 2.0;
    const auto by_b = sweep_figure2(right, "b", {1.0, 10.0}, g);
    CHECK(by_b[1].road_extent > by_b[0].road_extent);
    for (const auto& e : by_b) CHECK_FALSE(e.touches_window);
}

TEST_CASE("single-value sweep delegates to eval + extract") {
    const GridSpec g = window(-5.0, 25.0, 0.0, 12.0, 120, 60);
    PartialParams fixed;
    fixed.a = 2.0;
    fixed.b = 2.0;
    const auto entry = sweep_figure2(fixed, "c", {3.0}, g).at(0);
    const Params p{2.0, 2.0, 3.0};
    const auto direct = extract_phi_contour(p, eval_field(p, g, 1.0), 1.0, 1.0);
    REQUIRE(direct.size() == entry.contours.size());
    CHECK(direct[0].vertices == entry.contours[0].vertices);
}

TEST_CASE("sweep argument errors") {
    PartialParams fixed;
    fixed.a = 2.0;
    CHECK_THROWS_AS(sweep_figure2(fixed, "c", {1.0}, GridSpec{}), ConfigError);
    fixed.b = 2.0;
    CHECK_THROWS_AS(sweep_figure2(fixed, "a", {1.0}, GridSpec{}), ConfigError);
    CHECK_THROWS_AS(sweep_figure2(fixed, "c", {-1.0}, GridSpec{}), ConfigError);
}

TEST_CASE("refinement stability of x_max") {
    PartialParams fixed;
    fixed.a = 2.0;
    fixed.b = 2.0;
    const GridSpec coarse = window(-5.0, 25.0, 0.0, 12.0, 201, 81);
    const GridSpec fine = window(-5.0, 25.0, 0.0, 12.0, 401, 161);
    const double x1 = sweep_figure2(fixed, "c", {4.0}, coarse)[0].x_max;
    const double x2 = sweep_figure2(fixed, "c", {4.0}, fine)[0].x_max;
    CHECK(std::abs(x1 - x2) <= 2.0 * coarse.dx());
}

TEST_CASE("csv tables") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(2.0) == "2");

    const auto empty = contour_table("c", 1.0, {});
    std::ostringstream os;
    write_csv(os, empty);
    CHECK(os.str() == "param_name,param_value,polyline_id,vertex_index,x,y\n");

    ContourPolyline a;
    a.vertices = {{0, 0}, {1, 0.5}};
    ContourPolyline b;
    b.vertices = {{2, 2}};
    const auto t = contour_table("b", 3.0, {a, b});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0] == std::vector<std::string>{"b", "3", "0", "0", "0", "0"});
    CHECK(t.rows[1] == std::vector<std::string>{"b", "3", "0", "1", "1", "0.5"});
    CHECK(t.rows[2] == std::vector<std::string>{"b", "3", "1", "0", "2", "2"});

    CsvTable bad;
    bad.header = {"x"};
    CHECK_THROWS_AS(bad.add_row({"1", "2"}), ConfigError);
    CHECK_THROWS_AS(write_csv("/nonexistent-dir/out.csv", t), IoError);

    const auto field = eval_field(kTwos, window(2.0, 3.0, 0.0, 1.0, 2, 2), 1.0);
    const auto ft = field_table(field);
    CHECK(ft.header == std::vector<std::string>{"x", "y", "value"});
    REQUIRE(ft.rows.size() == 4);
    CHECK(ft.rows[0] == std::vector<std::string>{"2", "0", "0"});
}
