#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "segwave/core/grid.hpp"
#include "segwave/core/ivp.hpp"
#include "segwave/core/roots.hpp"
#include "segwave/core/tridiagonal.hpp"
#include "segwave/error.hpp"
#include "unit/dense_oracle.hpp"

using namespace segwave;

namespace {

IvpOptions tol_options(double tol) {
    IvpOptions o;
    o.rtol = tol;
    o.atol = tol;
    return o;
}

OdeRhs exponential() {
    return [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0]; };
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an exception");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("integrate_ivp: constant field leaves the state unchanged") {
    auto rhs = [](double, std::span<const double>, std::span<double> dy) { dy[0] = 0.0; };
    const double y0[] = {1.0};
    const auto r = integrate_ivp(rhs, y0, 0.0, 10.0);
    CHECK(r.terminal[0] == 1.0);
    CHECK(r.t_final == 10.0);
}

TEST_CASE("integrate_ivp: exponential growth reaches e") {
    const double y0[] = {1.0};
    const auto r = integrate_ivp(exponential(), y0, 0.0, 1.0, tol_options(1e-10));
    CHECK(std::abs(r.terminal[0] - std::numbers::e) <= 1e-8);
}

TEST_CASE("integrate_ivp: harmonic oscillator returns after one period") {
    auto rhs = [](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    const double y0[] = {1.0, 0.0};
    const auto r = integrate_ivp(rhs, y0, 0.0, 2.0 * std::numbers::pi);
    CHECK(std::abs(r.terminal[0] - 1.0) <= 1e-6);
    CHECK(std::abs(r.terminal[1]) <= 1e-6);
}

TEST_CASE("integrate_ivp: backward integration") {
    const double y0[] = {std::numbers::e};
    const auto r = integrate_ivp(exponential(), y0, 1.0, 0.0, tol_options(1e-11));
    CHECK(std::abs(r.terminal[0] - 1.0) <= 1e-9);
}

TEST_CASE("integrate_ivp: global error tracks the tolerance") {
    // Halving tol should roughly halve the error; allow a factor 4 either way.
    for (double tol : {1e-6, 1e-7, 1e-8, 1e-9}) {
        const double y0[] = {1.0};
        const double e1 = std::abs(
            integrate_ivp(exponential(), y0, 0.0, 1.0, tol_options(tol)).terminal[0] -
            std::numbers::e);
        const double e2 = std::abs(
            integrate_ivp(exponential(), y0, 0.0, 1.0, tol_options(tol / 2)).terminal[0] -
            std::numbers::e);
        CAPTURE(tol);
        CAPTURE(e1);
        CAPTURE(e2);
        REQUIRE(e2 > 0.0);
        CHECK(e1 / e2 >= 0.5);
        CHECK(e1 / e2 <= 8.0);
    }
}

TEST_CASE("integrate_ivp: samples land exactly on requested abscissae") {
    IvpOptions o = tol_options(1e-12);
    for (int i = 0; i <= 10; ++i) o.sample_at.push_back(0.1 * i);
    const double y0[] = {1.0};
    const auto r = integrate_ivp(exponential(), y0, 0.0, 1.0, o);
    REQUIRE(r.t.size() == 11);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        CHECK(r.t[i] == o.sample_at[i]);
        CHECK(std::abs(r.state(i)[0] - std::exp(r.t[i])) <= 1e-10);
    }
}

TEST_CASE("integrate_ivp: observer stops the integration") {
    const double y0[] = {1.0};
    const auto r = integrate_ivp(exponential(), y0, 0.0, 10.0, {},
                                 [](double, std::span<const double> y) { return y[0] > 2.0; });
    CHECK(r.stopped);
    CHECK(r.terminal[0] > 2.0);
    CHECK(r.t_final < 10.0);
}

TEST_CASE("integrate_ivp: deterministic for identical inputs") {
    const double y0[] = {0.3};
    auto rhs = [](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = std::sin(t) * y[0] - y[0] * y[0];
    };
    const auto a = integrate_ivp(rhs, y0, 0.0, 7.0);
    const auto b = integrate_ivp(rhs, y0, 0.0, 7.0);
    CHECK(a.t == b.t);
    CHECK(a.y == b.y);
}

TEST_CASE("integrate_ivp: blow-up raises StepUnderflow") {
    auto rhs = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
    const double y0[] = {1.0};
    CHECK(kind_of([&] { integrate_ivp(rhs, y0, 0.0, 2.0); }) == ErrorKind::StepUnderflow);
}

TEST_CASE("integrate_ivp: non-finite rhs raises NonFiniteRhs") {
    auto rhs = [](double t, std::span<const double>, std::span<double> dy) {
        dy[0] = t > 0.5 ? std::nan("") : 1.0;
    };
    const double y0[] = {0.0};
    CHECK(kind_of([&] { integrate_ivp(rhs, y0, 0.0, 1.0); }) == ErrorKind::NonFiniteRhs);
}

TEST_CASE("bisect_root: closed-form roots") {
    BisectOptions o;
    o.f_tol = 0.0;
    auto lin = [](double x) { return x - 1.0; };
    CHECK(std::abs(bisect_root(lin, make_bracket(lin, 0.0, 2.0), o) - 1.0) <= o.x_tol);
    auto sq = [](double x) { return x * x - 2.0; };
    CHECK(std::abs(bisect_root(sq, make_bracket(sq, 1.0, 2.0), o) - std::numbers::sqrt2) <= 1e-12);
    auto cs = [](double x) { return std::cos(x); };
    CHECK(std::abs(bisect_root(cs, make_bracket(cs, 1.0, 2.0), o) - std::numbers::pi / 2) <= 1e-12);
}

TEST_CASE("bisect_root: never leaves the current bracket") {
    double lo = 0.0, hi = 3.0;
    bool outside = false;
    auto f = [&](double x) {
        if (x < lo || x > hi) outside = true;
        return std::tanh(x - 1.234);
    };
    RootBracket b = make_bracket(f, lo, hi);
    // Track the bracket by replaying the bisection rule.
    double flo = b.f_lo;
    auto tracking = [&](double x) {
        const double v = f(x);
        if ((v < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = v;
        } else {
            hi = x;
        }
        return v;
    };
    BisectOptions o;
    o.f_tol = 0.0;
    const double root = bisect_root(tracking, b, o);
    CHECK_FALSE(outside);
    CHECK(std::abs(root - 1.234) <= 1e-11);
}

TEST_CASE("bisect_root: invalid bracket raises NoSignChange") {
    auto f = [](double x) { return x * x + 1.0; };
    CHECK(kind_of([&] { bisect_root(f, make_bracket(f, -1.0, 1.0)); }) == ErrorKind::NoSignChange);
    CHECK(kind_of([&] { bisect_root(f, RootBracket{1.0, 0.0, -1.0, 1.0}); }) ==
          ErrorKind::NoSignChange);
}

TEST_CASE("solve_tridiagonal: hand-computed systems") {
    {
        const std::vector<double> sub(2, 0.0), sup(2, 0.0), diag(3, 1.0), rhs{4.0, -2.0, 7.5};
        CHECK(solve_tridiagonal(sub, diag, sup, rhs) == rhs);
    }
    {
        const std::vector<double> sub(2, -1.0), sup(2, -1.0), diag(3, 2.0), rhs(3, 1.0);
        const auto x = solve_tridiagonal(sub, diag, sup, rhs);
        CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(x[2] == doctest::Approx(1.5).epsilon(1e-14));
    }
    {
        const std::vector<double> sub{0.0}, sup{1.0}, diag{1.0, 1.0}, rhs{2.0, 1.0};
        const auto x = solve_tridiagonal(sub, diag, sup, rhs);
        CHECK(x[0] == 1.0);
        CHECK(x[1] == 1.0);
    }
}

TEST_CASE("solve_tridiagonal: zero pivot raises SingularPivot") {
    const std::vector<double> sub{1.0}, sup{1.0}, diag{0.0, 1.0}, rhs{1.0, 1.0};
    CHECK(kind_of([&] { solve_tridiagonal(sub, diag, sup, rhs); }) == ErrorKind::SingularPivot);
    const std::vector<double> diag2{1.0, 1.0};
    CHECK(kind_of([&] { solve_tridiagonal(sub, diag2, sup, rhs); }) == ErrorKind::SingularPivot);
}

TEST_CASE("solve_tridiagonal: agrees with dense elimination on random dominant systems") {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + gen() % 50;
        std::vector<double> sub(n - 1), sup(n - 1), diag(n), rhs(n);
        for (auto& v : sub) v = u(gen);
        for (auto& v : sup) v = u(gen);
        for (auto& v : rhs) v = u(gen);
        for (std::size_t i = 0; i < n; ++i) diag[i] = (u(gen) < 0 ? -1.0 : 1.0) * (2.0 + u(gen));
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            dense[i][i] = diag[i];
            if (i + 1 < n) {
                dense[i][i + 1] = sup[i];
                dense[i + 1][i] = sub[i];
            }
        }
        const auto x = solve_tridiagonal(sub, diag, sup, rhs);
        const auto ref = testing::dense_solve(dense, rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) <= 1e-10);
        // Residual check relative to the rhs.
        double rmax = 0.0, bmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += sub[i - 1] * x[i - 1];
            if (i + 1 < n) s += sup[i] * x[i + 1];
            rmax = std::max(rmax, std::abs(s - rhs[i]));
            bmax = std::max(bmax, std::abs(rhs[i]));
        }
        CHECK(rmax <= 1e-10 * bmax);
    }
}

TEST_CASE("solve_block_tridiagonal: agrees with dense elimination") {
    constexpr std::size_t B = 3;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + gen() % 20;
        std::vector<Block<B>> sub(n - 1), diag(n), sup(n - 1);
        std::vector<BlockVector<B>> rhs(n);
        for (auto& b : sub)
            for (auto& v : b) v = u(gen);
        for (auto& b : sup)
            for (auto& v : b) v = u(gen);
        for (auto& b : diag) {
            for (auto& v : b) v = u(gen);
            // Row-permuted dominance exercises the in-block pivoting.
            std::swap(b[0], b[1]);
            b[1] += 6.0;
            b[3] += 6.0;
            b[8] += 6.0;
        }
        for (auto& r : rhs)
            for (auto& v : r) v = u(gen);
        const std::size_t m = n * B;
        std::vector<std::vector<double>> dense(m, std::vector<double>(m, 0.0));
        std::vector<double> flat(m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < B; ++a) {
                flat[i * B + a] = rhs[i][a];
                for (std::size_t c = 0; c < B; ++c) {
                    dense[i * B + a][i * B + c] = diag[i][a * B + c];
                    if (i > 0) dense[i * B + a][(i - 1) * B + c] = sub[i - 1][a * B + c];
                    if (i + 1 < n) dense[i * B + a][(i + 1) * B + c] = sup[i][a * B + c];
                }
            }
        const auto x = solve_block_tridiagonal<B>(sub, diag, sup, rhs);
        const auto ref = testing::dense_solve(dense, flat);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < B; ++a) CHECK(std::abs(x[i][a] - ref[i * B + a]) <= 1e-10);
    }
}

TEST_CASE("Grid1D and Profile invariants") {
    CHECK_THROWS_AS(Grid1D(1.0, 0.0, 5), Error);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), Error);
    const Grid1D g(-2.0, 3.0, 11);
    CHECK(g.spacing() == 0.5);
    CHECK(g.at(10) == 3.0);
    CHECK(g.at(4) == 0.0);
    CHECK_THROWS_AS(Profile(g, std::vector<double>(10, 0.0)), Error);
    std::vector<double> bad(11, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(Profile(g, bad), Error);

    std::vector<double> cubic(11);
    for (std::size_t i = 0; i < 11; ++i) cubic[i] = std::pow(g.at(i), 3) - g.at(i);
    const Profile p(g, cubic);
    CHECK(p.interpolate(0.3) == doctest::Approx(0.027 - 0.3).epsilon(1e-12));
    CHECK(p.interpolate(-5.0) == cubic.front());
}

TEST_CASE("one-sided stencils are exact on quartics") {
    const double h = 0.1;
    std::vector<double> f(8);
    auto q = [](double x) { return 2.0 * std::pow(x, 4) - x * x + 3.0 * x - 1.0; };
    auto dq = [](double x) { return 8.0 * std::pow(x, 3) - 2.0 * x + 3.0; };
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = q(0.5 + h * i);
    CHECK(derivative_left_end(f, h) == doctest::Approx(dq(0.5)).epsilon(1e-10));
    CHECK(derivative_right_end(f, h) == doctest::Approx(dq(0.5 + 7 * h)).epsilon(1e-10));
}

TEST_CASE("find_crossing interpolates linearly") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> v{1.0, 0.8, 0.4, 0.0};
    double pos = 0.0;
    REQUIRE(find_crossing(x, v, 0.5, pos));
    CHECK(pos == doctest::Approx(1.75));
    CHECK_FALSE(find_crossing(x, v, 2.0, pos));
}
