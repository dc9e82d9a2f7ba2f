#include <doctest.h>

#include <cmath>
#include <random>

#include "fieldroad/errors.hpp"
#include "fieldroad/hjsolver.hpp"

using namespace fieldroad;

namespace {

const Params kTwos{2.0, 2.0, 2.0};

SolverConfig small_config(std::size_t refine = 1, Scheme scheme = Scheme::Godunov) {
    SolverConfig cfg;
    cfg.spec = {-2.0, 6.0, 0.0, 3.0, 40 * refine + 1, 15 * refine + 1};
    cfg.t_end = 0.5;
    cfg.scheme = scheme;
    return cfg;
}

double exact_h(const Params& p, double p1, double p2) { return p1 * p1 + p2 * p2 + p.c * p1 + 1.0; }

}  // namespace

TEST_CASE("scheme names") {
    CHECK(scheme_from_string("lf") == Scheme::LaxFriedrichs);
    CHECK(scheme_from_string(to_string(Scheme::Godunov)) == Scheme::Godunov);
    CHECK(scheme_from_string(to_string(Scheme::LaxFriedrichs)) == Scheme::LaxFriedrichs);
    CHECK_THROWS_AS(scheme_from_string("eno"), ConfigError);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(validate(SolverConfig{}));
    SolverConfig cfg;
    cfg.cfl = 1.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = SolverConfig{};
    cfg.t_end = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = SolverConfig{};
    cfg.k_init = -1.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("initial data") {
    const GridSpec g{-1.0, 3.0, 0.0, 2.0, 41, 21};
    const auto v = initial_data(g, 50.0);
    CHECK(v.at(10, 0) == 0.0);
    std::size_t zeros = 0;
    for (double x : v.values) zeros += x == 0.0 ? 1 : 0;
    CHECK(zeros == 1);
    CHECK(v.at(40, 20) == 50.0);
    CHECK(v.at(30, 0) == 50.0);  // x = 2
    CHECK(v.at(15, 0) == doctest::Approx(25.0));

    const auto w = initial_data(g, 100.0);
    for (std::size_t k = 0; k < v.values.size(); ++k) CHECK(w.values[k] == doctest::Approx(2.0 * v.values[k]));

    CHECK_THROWS_AS(initial_data({1.0, 3.0, 0.0, 2.0, 5, 5}, 1.0), ConfigError);
    CHECK_THROWS_AS(initial_data({-1.0, 3.0, 0.5, 2.0, 5, 5}, 1.0), ConfigError);
    CHECK_THROWS_AS(initial_data({-1.0, 3.0, 0.0, 2.0, 6, 5}, 1.0), ConfigError);
}

TEST_CASE("numerical Hamiltonian consistency") {
    const std::array<double, 2> big{100.0, 100.0};
    for (auto scheme : {Scheme::LaxFriedrichs, Scheme::Godunov}) {
        CHECK(numerical_hamiltonian(scheme, {0, 0}, {0, 0}, kTwos, big) == 1.0);
        CHECK(numerical_hamiltonian(scheme, {-1, 0}, {-1, 0}, kTwos, big) == doctest::Approx(1.0 - 1.0));
        std::mt19937_64 rng(40);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int k = 0; k < 500; ++k) {
            const std::array<double, 2> p{u(rng), u(rng)};
            CHECK(numerical_hamiltonian(scheme, p, p, kTwos, {30.0, 30.0}) ==
                  doctest::Approx(exact_h(kTwos, p[0], p[1])).epsilon(1e-13));
        }
    }
}

TEST_CASE("numerical Hamiltonian monotonicity by finite differences") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double h = 1e-6;
    for (auto scheme : {Scheme::LaxFriedrichs, Scheme::Godunov}) {
        for (int k = 0; k < 2000; ++k) {
            std::array<double, 2> pm{u(rng), u(rng)};
            std::array<double, 2> pp{u(rng), u(rng)};
            const std::array<double, 2> visc{13.0, 11.0};
            const double base = numerical_hamiltonian(scheme, pm, pp, kTwos, visc);
            for (int axis = 0; axis < 2; ++axis) {
                auto pm2 = pm;
                pm2[axis] += h;
                auto pp2 = pp;
                pp2[axis] += h;
                CHECK(numerical_hamiltonian(scheme, pm2, pp, kTwos, visc) >= base - 1e-9);
                CHECK(numerical_hamiltonian(scheme, pm, pp2, kTwos, visc) <= base + 1e-9);
            }
        }
    }
}

TEST_CASE("Lax-Friedrichs rejects insufficient viscosity") {
    CHECK_THROWS_AS(numerical_hamiltonian(Scheme::LaxFriedrichs, {3, 0}, {0, 0}, kTwos, {1.0, 1.0}),
                    StabilityError);
    CHECK_NOTHROW(numerical_hamiltonian(Scheme::Godunov, {3, 0}, {0, 0}, kTwos, {0.0, 0.0}));
}

TEST_CASE("step on trivial states") {
    const auto cfg = small_config();
    SUBCASE("zero stays zero") {
        ScalarField z(cfg.spec, Quantity::PdeIterate, 0.0);
        const double dt = stability_bounds(z, cfg, kTwos).dt_max;
        const auto next = step(z, cfg, kTwos, std::min(dt, 0.01));
        for (double v : next.values) CHECK(v == 0.0);
    }
    SUBCASE("constant state drops by dt") {
        ScalarField z(cfg.spec, Quantity::PdeIterate, 100.0);
        const double dt = 1e-3;
        const auto next = step(z, cfg, kTwos, dt);
        for (double v : next.values) CHECK(v == doctest::Approx(100.0 - dt));
    }
    SUBCASE("oversized dt") {
        const auto v0 = initial_data(cfg.spec, 50.0);
        const double dt = stability_bounds(v0, cfg, kTwos).dt_max;
        CHECK_THROWS_AS(step(v0, cfg, kTwos, 2.0 * dt), StabilityError);
        CHECK_THROWS_AS(step(v0, cfg, kTwos, 0.0), StabilityError);
    }
}

TEST_CASE("zero set grows by at most one cell layer per step") {
    const auto cfg = small_config();
    auto v = initial_data(cfg.spec, 50.0);
    const auto& g = cfg.spec;
    for (int n = 0; n < 30; ++n) {
        const double dt = stability_bounds(v, cfg, kTwos).dt_max;
        const auto next = step(v, cfg, kTwos, dt);
        for (std::size_t j = 0; j < g.ny; ++j) {
            for (std::size_t i = 0; i < g.nx; ++i) {
                if (next.at(i, j) != 0.0 || v.at(i, j) == 0.0) continue;
                bool neighbour_zero = false;
                for (int di = -1; di <= 1; ++di) {
                    for (int dj = -1; dj <= 1; ++dj) {
                        const long ii = static_cast<long>(i) + di;
                        const long jj = static_cast<long>(j) + dj;
                        if (ii < 0 || jj < 0 || ii >= static_cast<long>(g.nx) || jj >= static_cast<long>(g.ny)) continue;
                        neighbour_zero = neighbour_zero || v.at(ii, jj) == 0.0;
                    }
                }
                CHECK(neighbour_zero);
            }
        }
        v = next;
    }
}

TEST_CASE("monotone comparison of two runs") {
    const auto cfg = small_config();
    auto v = initial_data(cfg.spec, 50.0);
    auto w = v;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> bump(0.0, 0.5);
    for (double& x : w.values) x += bump(rng);
    for (int n = 0; n < 200; ++n) {
        const double dt = std::min(stability_bounds(v, cfg, kTwos).dt_max, stability_bounds(w, cfg, kTwos).dt_max);
        v = step(v, cfg, kTwos, dt);
        w = step(w, cfg, kTwos, dt);
        for (std::size_t k = 0; k < v.values.size(); ++k) REQUIRE(v.values[k] <= w.values[k] + 1e-12);
    }
}

TEST_CASE("truncation error on a smooth state is first order") {
    // Smooth positive state far above the obstacle: (v - step(v)) / dt = H^.
    auto run = [](std::size_t refine) {
        SolverConfig cfg;
        cfg.spec = {1.0, 3.0, 1.0, 3.0, 20 * refine + 1, 20 * refine + 1};
        ScalarField v(cfg.spec, Quantity::PdeIterate);
        const auto& g = cfg.spec;
        for (std::size_t j = 0; j < g.ny; ++j)
            for (std::size_t i = 0; i < g.nx; ++i)
                v.at(i, j) = 50.0 + std::sin(g.x(i)) + 0.3 * g.y(j) * g.y(j);
        const double dt = 0.5 * stability_bounds(v, cfg, kTwos).dt_max;
        const auto next = step(v, cfg, kTwos, dt);
        double worst = 0.0;
        for (std::size_t j = 2; j + 2 < g.ny; ++j) {
            for (std::size_t i = 2; i + 2 < g.nx; ++i) {
                const double hnum = (v.at(i, j) - next.at(i, j)) / dt;
                const double hex = exact_h(kTwos, std::cos(g.x(i)), 0.6 * g.y(j));
                worst = std::max(worst, std::abs(hnum - hex));
            }
        }
        return worst;
    };
    const double e1 = run(1);
    const double e2 = run(2);
    const double e4 = run(4);
    CHECK(e1 < 0.5);
    CHECK(e2 < 0.65 * e1);
    CHECK(e4 < 0.65 * e2);
}

TEST_CASE("solve: nonnegative, reaches t_end, obstacle near the origin") {
    const auto cfg = small_config();
    const auto r = solve(cfg, kTwos);
    CHECK(r.t_final == cfg.t_end);
    CHECK(r.steps > 0);
    CHECK(r.active_nodes > 0);
    for (double v : r.field.values) CHECK(v >= 0.0);
}

TEST_CASE("short time with steep data: obstacle set hugs the origin") {
    auto cfg = small_config();
    cfg.t_end = 1e-3;
    cfg.k_init = 1000.0;
    const auto r = solve(cfg, kTwos);
    const auto& g = cfg.spec;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            if (r.field.at(i, j) == 0.0) CHECK(std::hypot(g.x(i), g.y(j)) <= 2.0 * g.dx());
        }
    }
}

TEST_CASE("compare_to_closed_form") {
    const auto cfg = small_config();
    ScalarField exact(cfg.spec, Quantity::V);
    for (std::size_t j = 0; j < cfg.spec.ny; ++j)
        for (std::size_t i = 0; i < cfg.spec.nx; ++i)
            exact.at(i, j) = solve_minimizer(kTwos, {cfg.spec.x(i), cfg.spec.y(j), 0.5}).v;
    const auto self = compare_to_closed_form(exact, kTwos, 0.5, cfg.spec);
    CHECK(self.linf == 0.0);
    CHECK(self.l1 == 0.0);
    CHECK(self.collar == 5);
    CHECK(self.n_compared == (cfg.spec.nx - 10) * (cfg.spec.ny - 5));

    auto other = cfg.spec;
    other.nx += 1;
    CHECK_THROWS_AS(compare_to_closed_form(exact, kTwos, 0.5, other), ConfigError);
    SolveResult fake;
    fake.field = exact;
    fake.t_final = 0.5;
    CHECK_NOTHROW(compare_to_closed_form(fake, kTwos, 0.5, cfg.spec));
    CHECK_THROWS_AS(compare_to_closed_form(fake, kTwos, 0.4, cfg.spec), DomainError);
}

TEST_CASE("refinement and k sensitivity against the closed form") {
    std::vector<double> linf;
    for (std::size_t refine : {1, 2, 4}) {
        const auto cfg = small_config(refine);
        const auto r = solve(cfg, kTwos);
        linf.push_back(compare_to_closed_form(r, kTwos, cfg.t_end, cfg.spec).linf);
    }
    CHECK(linf[1] < linf[0]);
    CHECK(linf[2] < linf[1]);

    auto cfg = small_config(1);
    const double e50 = compare_to_closed_form(solve(cfg, kTwos), kTwos, cfg.t_end, cfg.spec).linf;
    cfg.k_init = 100.0;
    const double e100 = compare_to_closed_form(solve(cfg, kTwos), kTwos, cfg.t_end, cfg.spec).linf;
    CHECK(std::abs(e100 - e50) < e50);
}

TEST_CASE("Lax-Friedrichs runs and stays nonnegative") {
    const auto cfg = small_config(1, Scheme::LaxFriedrichs);
    const auto r = solve(cfg, kTwos);
    for (double v : r.field.values) CHECK(v >= 0.0);
    CHECK(r.t_final == cfg.t_end);
}
