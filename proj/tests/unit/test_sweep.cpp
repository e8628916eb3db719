#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "segwave/error.hpp"
#include "segwave/sweep.hpp"

using namespace segwave;
using namespace segwave::sweep;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidArgument;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

SpeedCurve sample_curve() {
    SpeedCurve c;
    c.alpha = 1.5;
    c.r = 0.75;
    c.predicted_threshold = 3.0;
    c.d_values = {0.1, 1.0 / 3.0, 7.25};
    c.c_inf = {0.1234567890123456789, std::nullopt, -1.0 / 7.0};
    c.k_list = {10.0, 1000.0};
    c.c_k = {{0.1, 0.2, std::nullopt}, {std::nullopt, -2.0 / 3.0, 1e-300}};
    c.diagnostics = {"", "c_inf: failed, twice", ""};
    c.sign_change_d = 3.0000000001;
    return c;
}

}  // namespace

TEST_CASE("rescale_parameters: worked examples") {
    const Rescaled unit = rescale_parameters({});
    CHECK(unit.k == 1.0);
    CHECK(unit.alpha == 1.0);
    CHECK(unit.d == 1.0);
    CHECK(unit.r == 1.0);

    const Rescaled s = rescale_parameters({1, 3, 4, 2, 1, 1, 5, 5});
    CHECK(s.k == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(s.alpha == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.d == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(s.r == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.alpha / s.r >= 1.0);

    CHECK(kind_of([] { rescale_parameters({1, 3, 2, 4, 1, 1, 5, 5}); }) == ErrorKind::AssumptionViolation);
    CHECK(kind_of([] { rescale_parameters({1, 3, 2, 4, 1, 0, 5, 5}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("rescale_parameters: accepted tuples give alpha/r >= 1 and alpha k/r > 1 for k > 1") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> dist(0.2, 5.0);
    int accepted = 0;
    for (int i = 0; i < 200; ++i) {
        RawEcologicalParams p{dist(gen), dist(gen), dist(gen), dist(gen),
                              dist(gen), dist(gen), dist(gen), dist(gen)};
        const bool ok = p.k2 * p.a2 / (p.r2 * p.r2) >= p.k1 * p.a1 / (p.r1 * p.r1);
        if (!ok) {
            CHECK(kind_of([&] { rescale_parameters(p); }) == ErrorKind::AssumptionViolation);
            continue;
        }
        ++accepted;
        const Rescaled s = rescale_parameters(p);
        CHECK(s.alpha / s.r >= 1.0 - 1e-14);
        if (s.k > 1.0) CHECK(s.alpha * s.k / s.r > 1.0);
    }
    CHECK(accepted > 20);
}

TEST_CASE("rescale_parameters then limit speed equals the hand-scaled limit speed") {
    const RawEcologicalParams tuples[] = {{1, 3, 4, 2, 1, 1, 5, 5}, {2, 1, 1, 1.5, 1, 1, 1, 3}};
    for (const auto& p : tuples) {
        const Rescaled s = rescale_parameters(p);
        const double alpha = p.k2 * p.a2 * p.r1 / (p.k1 * p.a1 * p.r2);
        const double d = p.d2 / p.d1;
        const double r = p.r2 / p.r1;
        const double a = limit::solve_limit_speed({s.alpha, s.r, s.d});
        const double b = limit::solve_limit_speed({alpha, r, d});
        CHECK(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("SweepSpec: validation") {
    SweepSpec s;
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
    s.d_grid = {1.0, 2.0, 2.0};
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
    s.d_grid = {1.0, 2.0, 3.0};
    s.validate();
    s.k_list = {1.0};
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
    s.k_list = {10.0, 5.0};
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
    s.k_list = {10.0};
    s.alpha = -1.0;
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("geometric_grid: endpoints and ratios") {
    const auto g = geometric_grid(0.1, 10.0, 21);
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.1);
    CHECK(g.back() == 10.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 0.1)));
}

TEST_CASE("format_csv: layout, empty cells and diagnostics") {
    SpeedCurve c = sample_curve();
    const std::string csv = format_csv(c);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "d,c_inf,c_k_10,c_k_1000,diagnostics");
    CHECK(lines[2] == "0.33333333333333331,,0.20000000000000001,-0.66666666666666663,c_inf: failed; twice");
    CHECK(csv.find("nan") == std::string::npos);

    c.diagnostics = {"", "", ""};
    c.k_list.clear();
    c.c_k.clear();
    std::istringstream plain(format_csv(c));
    std::getline(plain, line);
    CHECK(line == "d,c_inf");
}

TEST_CASE("format_csv: parses back to the same values") {
    const SpeedCurve c = sample_curve();
    const SpeedCurve back = parse_csv(format_csv(c));
    CHECK(back.d_values == c.d_values);
    CHECK(back.c_inf == c.c_inf);
    CHECK(back.k_list == c.k_list);
    CHECK(back.c_k == c.c_k);
    CHECK(back.diagnostics[1] == "c_inf: failed; twice");

    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    SpeedCurve r;
    for (int i = 0; i < 500; ++i) {
        r.d_values.push_back(std::ldexp(1.0 + i, -3));
        r.c_inf.push_back(dist(gen) * std::pow(10.0, (i % 40) - 20));
        r.diagnostics.emplace_back();
    }
    CHECK(parse_csv(format_csv(r)).c_inf == r.c_inf);
}

TEST_CASE("emit_report: files, sidecar and byte stability") {
    const auto dir = std::filesystem::temp_directory_path() / "segwave_test_sweep";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "curve.csv").string();
    const SpeedCurve c = sample_curve();
    emit_report(c, path);
    const std::string csv1 = slurp(path);
    const std::string json1 = slurp(sidecar_path(path));
    emit_report(c, path);
    CHECK(slurp(path) == csv1);
    CHECK(slurp(sidecar_path(path)) == json1);
    CHECK(csv1 == format_csv(c));
    CHECK(sidecar_path(path) == (dir / "curve.json").string());
    CHECK(sidecar_path("a.b/report") == "a.b/report.json");
    CHECK(json1.find("\"threshold\": 3.0") != std::string::npos);
    CHECK(json1.find("\"sign_change_d\": 3.0000000001") != std::string::npos);
    CHECK(json1.find("\"tool_version\"") != std::string::npos);

    try {
        emit_report(c, (dir / "missing" / "x.csv").string());
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoError);
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("apply_json: field names match the structs") {
    SweepSpec s;
    apply_json(R"({"alpha": 2, "r": 8, "d_grid": [0.25, 0.5, 1], "k_list": [10, 100], "output_path": "o.csv"})", s);
    CHECK(s.alpha == 2.0);
    CHECK(s.r == 8.0);
    CHECK(s.d_grid == std::vector<double>{0.25, 0.5, 1.0});
    CHECK(s.k_list == std::vector<double>{10.0, 100.0});
    CHECK(s.output_path == "o.csv");

    RawEcologicalParams p;
    apply_json(R"({"d2": 3, "r1": 4, "r2": 2, "k1": 5, "k2": 5})", p);
    CHECK(p.d1 == 1.0);
    CHECK(p.d2 == 3.0);
    CHECK(p.r1 == 4.0);
    CHECK(p.k2 == 5.0);

    CHECK(kind_of([&] { apply_json("[1, 2]", s); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { apply_json(R"({"alpha": "x"})", s); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { apply_json("{", s); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("run_sweep: finite-k columns, missing cells and the threshold") {
    SweepSpec s;
    s.alpha = 2.0;
    s.r = 8.0;
    s.d_grid = {0.25, 0.8};
    s.k_list = {20.0, 300.0};
    s.threads = 2;
    const SpeedCurve c = run_sweep(s);
    REQUIRE(c.c_inf[0].has_value());
    REQUIRE(c.c_inf[1].has_value());
    CHECK(*c.c_inf[0] > 0.0);
    CHECK(*c.c_inf[1] < 0.0);
    REQUIRE(c.sign_change_d.has_value());
    CHECK(std::abs(*c.sign_change_d - 0.5) <= 1e-6);
    CHECK(c.predicted_threshold == 0.5);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(c.c_k[0][i].has_value());
        REQUIRE(c.c_k[1][i].has_value());
        const double direct = wave::solve_wave({300.0, 2.0, 8.0, c.d_values[i]}).c;
        CHECK(std::abs(*c.c_k[1][i] - direct) <= 1e-7);
        CHECK(std::abs(*c.c_k[1][i] - *c.c_inf[i]) < std::abs(*c.c_k[0][i] - *c.c_inf[i]));
        CHECK(c.diagnostics[i].empty());
    }
}

TEST_CASE("run_sweep: result does not depend on the thread count") {
    SweepSpec s;
    s.d_grid = {0.5, 1.5, 3.0};
    s.threads = 1;
    SweepOptions o;
    o.d_tol = 1e-6;
    std::size_t calls = 0;
    o.on_progress = [&](std::size_t done, std::size_t total) {
        ++calls;
        CHECK(done <= total);
    };
    const std::string one = format_csv(run_sweep(s, o));
    CHECK(calls == 3);
    s.threads = 3;
    CHECK(format_csv(run_sweep(s, o)) == one);
}

TEST_CASE("locate_sign_change: matches alpha^2/r for random pairs") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> dist(0.5, 3.0);
    for (int i = 0; i < 10; ++i) {
        const double alpha = dist(gen);
        const double r = dist(gen);
        const double t = alpha * alpha / r;
        const double found = locate_sign_change(alpha, r, t / 1.3, t * 1.2);
        CAPTURE(alpha);
        CAPTURE(r);
        CHECK(std::abs(found - t) <= 1e-6);
    }
    CHECK(kind_of([] { locate_sign_change(1.0, 1.0, 2.0, 3.0); }) == ErrorKind::NoSignChange);
}
