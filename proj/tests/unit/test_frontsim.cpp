#include <cmath>
#include <vector>

#include "doctest.h"
#include "segwave/error.hpp"
#include "segwave/frontsim.hpp"

using namespace segwave;
using namespace segwave::pde;

namespace {

PdeState constant_state(double u, double v) {
    const Grid1D g(-10.0, 10.0, 201);
    return PdeState(g, std::vector<double>(201, u), std::vector<double>(201, v));
}

}  // namespace

TEST_CASE("step: equilibria are preserved") {
    const SystemParams p{50.0, 1.0, 1.0, 2.0};
    for (auto [u, v] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
        PdeState s = constant_state(u, v);
        for (int i = 0; i < 100; ++i) s = step(s, 0.05, p);
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            CHECK(std::abs(s.u[i] - u) <= 1e-12);
            CHECK(std::abs(s.v[i] - v) <= 1e-12);
        }
        CHECK(s.time == doctest::Approx(5.0));
    }
}

TEST_CASE("step: rejects bad input") {
    CHECK_THROWS_AS(step(constant_state(0.5, 0.5), -0.1, {10.0, 1.0, 1.0, 1.0}), Error);
    const Grid1D g(0.0, 1.0, 11);
    CHECK_THROWS_AS(PdeState(g, std::vector<double>(11, 1.5), std::vector<double>(11, 0.0)), Error);
    CHECK_THROWS_AS(PdeState(g, std::vector<double>(10, 0.5), std::vector<double>(11, 0.0)), Error);
}

TEST_CASE("step: stays inside the unit square from rough data") {
    const Grid1D g(-20.0, 20.0, 401);
    std::vector<double> u(401), v(401);
    for (std::size_t i = 0; i < 401; ++i) {
        u[i] = 0.5 + 0.5 * std::sin(1.7 * static_cast<double>(i));
        v[i] = 0.5 + 0.5 * std::cos(2.3 * static_cast<double>(i));
    }
    PdeState s(g, u, v);
    const SystemParams p{200.0, 1.5, 0.7, 3.0};
    for (int i = 0; i < 200; ++i) {
        s = step(s, 0.05, p);
        for (std::size_t j = 0; j < 401; ++j) {
            REQUIRE(s.u[j] >= -1e-9);
            REQUIRE(s.u[j] <= 1.0 + 1e-9);
            REQUIRE(s.v[j] >= -1e-9);
            REQUIRE(s.v[j] <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("measure_front_speed: lone u front runs at speed 2") {
    const Grid1D g(-100.0, 300.0, 4001);
    const auto e = measure_front_speed(step_state(g, true, false), {50.0, 1.0, 1.0, 1.0}, 200.0);
    CHECK(e.tracked == Tracked::U);
    CHECK(std::abs(e.fitted_speed - 2.0) <= 0.05 * 2.0);
    CHECK(e.fit_residual <= 0.02 * std::abs(e.fitted_speed) + 1e-3);
    CHECK(e.monotone);
}

TEST_CASE("measure_front_speed: lone v front runs at 2 sqrt(rd)") {
    const Grid1D g(-300.0, 100.0, 4001);
    const auto e = measure_front_speed(step_state(g, false, true), {50.0, 1.0, 1.0, 4.0}, 200.0);
    CHECK(e.tracked == Tracked::V);
    CHECK(std::abs(std::abs(e.fitted_speed) - 4.0) <= 0.05 * 4.0);
    CHECK(e.fitted_speed < 0.0);
    CHECK(e.fit_residual <= 0.02 * std::abs(e.fitted_speed) + 1e-3);
}

TEST_CASE("measure_front_speed: symmetric competition stands still") {
    const Grid1D g(-200.0, 200.0, 4001);
    const auto e = measure_front_speed(step_state(g, true, true), {50.0, 1.0, 1.0, 1.0}, 100.0);
    CHECK(std::abs(e.fitted_speed) <= 0.05);
    CHECK(e.monotone);
}

TEST_CASE("measure_front_speed: translation equivariance") {
    const Grid1D g(-150.0, 150.0, 3001);
    const SystemParams p{30.0, 1.0, 1.0, 0.5};
    FrontOptions o;
    o.recenter = false;
    const PdeState base = step_state(g, true, true, 0.0);
    std::vector<double> u(base.u.size()), v(base.v.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const std::size_t j = i >= 17 ? i - 17 : 0;
        u[i] = base.u[j];
        v[i] = base.v[j];
    }
    const auto a = measure_front_speed(base, p, 30.0, 0.5, o);
    const auto b = measure_front_speed(PdeState(g, u, v), p, 30.0, 0.5, o);
    REQUIRE(a.positions.size() == b.positions.size());
    for (std::size_t i = 0; i < a.positions.size(); ++i)
        CHECK(std::abs(b.positions[i] - a.positions[i] - 17 * g.spacing()) <= 1e-9);
}

TEST_CASE("measure_front_speed: lost front is reported") {
    const Grid1D g(-50.0, 50.0, 1001);
    try {
        measure_front_speed(step_state(g, true, false), {10.0, 1.0, 1.0, 1.0}, 60.0, 0.5,
                            FrontOptions{0.05, 1.0, Tracked::U, false, {}});
        FAIL("expected FrontLost");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FrontLost);
    }
}

TEST_CASE("measure_front_speed: refinement moves the speed within budget") {
    const SystemParams p{50.0, 1.0, 1.0, 1.0};
    const auto coarse = measure_front_speed(step_state(Grid1D(-100.0, 300.0, 2001), true, false), p,
                                            100.0, 0.5, FrontOptions{0.04, 1.0, Tracked::U, true, {}});
    const auto fine = measure_front_speed(step_state(Grid1D(-100.0, 300.0, 4001), true, false), p,
                                          100.0, 0.5, FrontOptions{0.02, 1.0, Tracked::U, true, {}});
    CHECK(std::abs(coarse.fitted_speed - fine.fitted_speed) <= 0.5 * 0.05 * 2.0);
}

TEST_CASE("compare_with_wave: PDE speed matches the travelling wave") {
    for (double d : {0.25, 1.0}) {
        const SystemParams p{50.0, 1.0, 1.0, d};
        const auto w = wave::solve_wave(p);
        CAPTURE(d);
        CHECK(compare_with_wave(p, w, 100.0) <= std::max(0.1, 0.1 * std::abs(w.c)));
    }
}
