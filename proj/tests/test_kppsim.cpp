#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fieldroad/errors.hpp"
#include "fieldroad/kppsim.hpp"

using namespace fieldroad;

namespace {

const Params kParams{2.0, 2.0, 2.0};

// Frozen output of the default eps = 0.2 run (141 x 51 nodes on
// [-4, 10] x [0, 5], t = 1), compared with its own collar 4 sqrt(0.2).
constexpr double kGapEps02 = 1.9639427474896647;

}  // namespace

TEST_CASE("eps run configuration is validated") {
    EpsRunConfig cfg;
    cfg.eps = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.cfl = 1.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.spec.y_min = 0.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    CHECK_NOTHROW(validate(EpsRunConfig{}));
}

TEST_CASE("a fixed dt above the stable step is rejected") {
    EpsRunConfig cfg;
    cfg.dt = 0.01;
    CHECK_THROWS_AS(solve_phase_eps(cfg, kParams), StabilityError);
}

TEST_CASE("phase collar") {
    CHECK(phase_collar(0.25, 1.0) == 2.0);
    CHECK(phase_collar(0.1, 0.4) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("gap of the closed form against itself is zero") {
    ScalarField f(EpsRunConfig{}.spec, Quantity::V);
    for (std::size_t j = 0; j < f.spec.ny; ++j) {
        for (std::size_t i = 0; i < f.spec.nx; ++i) {
            f.at(i, j) = solve_minimizer(kParams, {f.spec.x(i), f.spec.y(j), 1.0}).v;
        }
    }
    const auto rep = phase_gap(f, kParams, 1.0, 1.0);
    CHECK(rep.sup == 0.0);
    // x in [-3, 9] and y in [0, 4] at spacing 0.1.
    CHECK(rep.n_compared == 121 * 41);
    CHECK_THROWS_AS(phase_gap(f, kParams, 1.0, 7.5), ConfigError);
}

TEST_CASE("short eps run stays nonnegative and reaches t_end exactly") {
    EpsRunConfig cfg;
    cfg.t_end = 0.05;
    const auto run = solve_phase_eps(cfg, kParams);
    CHECK(run.t_final == 0.05);
    CHECK(run.min_value >= -1e-12);
    CHECK(run.dt_max <= 0.05);
    for (double v : run.field.values) CHECK(std::isfinite(v));
}

TEST_CASE("eps = 0.2 gap regression") {
    const auto run = solve_phase_eps(EpsRunConfig{}, kParams);
    const auto rep = phase_gap(run.field, kParams, run.t_final, phase_collar(0.2, 1.0));
    CHECK(rep.sup == doctest::Approx(kGapEps02).epsilon(1e-10));
}

TEST_CASE("gap to the closed form shrinks with eps") {
    const auto gaps = eps_trend(kParams, EpsRunConfig{}, {0.4, 0.2, 0.1});
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0].collar == gaps[2].collar);
    CHECK(gaps[1].sup < gaps[0].sup);
    CHECK(gaps[2].sup < gaps[1].sup);
    // Roughly first order: each halving of eps removes at least a third.
    CHECK(gaps[2].sup < 0.67 * gaps[1].sup);
    CHECK(gaps[1].sup < 0.67 * gaps[0].sup);

    const auto table = gap_table(gaps);
    CHECK(table.header == std::vector<std::string>{"param", "value", "metric"});
    CHECK(table.rows[1][0] == "eps");
    CHECK(table.rows[1][1] == "0.20000000000000001");
}

TEST_CASE("strip configuration") {
    StripConfig cfg;
    cfg.delta = 0.05;
    CHECK(cfg.sigma() * cfg.delta == doctest::Approx(cfg.a_target).epsilon(1e-15));
    CHECK(cfg.b_tilde() * cfg.delta == doctest::Approx(cfg.b_target).epsilon(1e-15));
    CHECK(cfg.step() == doctest::Approx(0.025 * 0.05 * 0.05).epsilon(1e-15));
    cfg.strip_rows = 3;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.delta = -0.1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = {};
    cfg.x_collar = 15.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("x-uniform drift-free strip: residual is the interface flux") {
    StripConfig cfg;
    cfg.b_target = 0.0;
    cfg.x_uniform_initial = true;
    cfg.delta = 0.2;
    const auto r1 = solve_thin_strip(cfg);
    cfg.delta = 0.1;
    const auto r2 = solve_thin_strip(cfg);
    CHECK(r1.residual == doctest::Approx(r1.interface_flux).epsilon(1e-9));
    CHECK(r2.residual == doctest::Approx(r2.interface_flux).epsilon(1e-9));
    CHECK(r2.residual < 0.6 * r1.residual);
}

TEST_CASE("thin strip approaches the Wentzell relation") {
    std::vector<StripReport> reports;
    for (double delta : {0.2, 0.1, 0.05}) {
        StripConfig cfg;
        cfg.delta = delta;
        reports.push_back(solve_thin_strip(cfg));
    }
    for (std::size_t k = 1; k < reports.size(); ++k) {
        CHECK(reports[k].residual < 0.6 * reports[k - 1].residual);
    }
    for (const auto& r : reports) {
        // Diffusion sweeps conserve mass; only the reaction changes it.
        CHECK(std::abs(r.mass_change - r.reaction_integral) < 1e-10 * r.reaction_integral);
        // Flux through the interface agrees from both sides.
        CHECK(r.flux_mismatch < 0.05 * r.flux_scale);
        CHECK(r.interface_flux > 0.0);
    }

    std::ostringstream out;
    write_csv(out, residual_table(reports));
    CHECK(out.str().rfind("param,value,metric\ndelta,0.20000000000000001,", 0) == 0);
}
