#include "segwave/core/ivp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "segwave/error.hpp"

namespace segwave {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kAlpha = 0.7 / 5.0;
constexpr double kBeta = 0.4 / 5.0;

void check_finite(std::span<const double> v, double t) {
    for (double x : v)
        if (!std::isfinite(x))
            fail(ErrorKind::NonFiniteRhs, "right-hand side is not finite at t=" + std::to_string(t));
}

double weighted_norm(std::span<const double> v, std::span<const double> y, const IvpOptions& o) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double sc = o.atol + o.rtol * std::abs(y[i]);
        m = std::max(m, std::abs(v[i]) / sc);
    }
    return m;
}

// Hairer-Norsett-Wanner starting step heuristic.
double initial_step(const OdeRhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, double direction, const IvpOptions& o) {
    const std::size_t n = y0.size();
    const double d0 = weighted_norm(y0, y0, o);
    const double d1 = weighted_norm(f0, y0, o);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + direction * h0 * f0[i];
    rhs(t0 + direction * h0, y1, f1);
    check_finite(f1, t0 + direction * h0);
    for (std::size_t i = 0; i < n; ++i) f1[i] -= f0[i];
    const double d2 = weighted_norm(f1, y0, o) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    return std::min(100.0 * h0, h1);
}

}  // namespace

IvpResult integrate_ivp(const OdeRhs& rhs, std::span<const double> y0, double t0, double t1,
                        const IvpOptions& o, const StepObserver& observer) {
    require(o.rtol >= 0.0 && o.atol >= 0.0 && (o.rtol > 0.0 || o.atol > 0.0),
            ErrorKind::InvalidArgument, "integration tolerances must be positive");
    require(std::isfinite(t0) && std::isfinite(t1) && t0 != t1, ErrorKind::InvalidArgument,
            "integration span must be finite and nondegenerate");
    const std::size_t n = y0.size();
    require(n > 0, ErrorKind::InvalidArgument, "empty initial state");

    const double direction = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double h_min = span * 1e-12;

    IvpResult result;
    std::vector<double> y(y0.begin(), y0.end());
    check_finite(y, t0);

    std::array<std::vector<double>, 7> k;
    for (auto& ki : k) ki.resize(n);
    std::vector<double> tmp(n), y_new(n), err(n);

    double t = t0;
    rhs(t, y, k[0]);
    check_finite(k[0], t);

    const bool sampling = !o.sample_at.empty();
    std::size_t next_sample = 0;
    auto record = [&](double tr, std::span<const double> yr) {
        result.t.push_back(tr);
        result.y.insert(result.y.end(), yr.begin(), yr.end());
    };
    if (sampling) {
        while (next_sample < o.sample_at.size() && o.sample_at[next_sample] == t0) {
            record(t0, y);
            ++next_sample;
        }
    } else {
        record(t0, y);
    }

    double h = o.initial_step > 0.0 ? o.initial_step : initial_step(rhs, t0, y, k[0], direction, o);
    h = std::min(h, o.max_step);
    double err_old = 1e-4;
    bool last_rejected = false;

    while (direction * (t1 - t) > 0.0) {
        if (result.accepted_steps + result.rejected_steps >= o.max_steps)
            fail(ErrorKind::IntegrationFailure, "step budget exhausted at t=" + std::to_string(t));
        if (h < h_min)
            fail(ErrorKind::StepUnderflow, "step size collapsed at t=" + std::to_string(t));

        const double h_proposed = h;
        double target = t1;
        if (sampling && next_sample < o.sample_at.size()) target = o.sample_at[next_sample];
        bool lands = false;
        if (direction * (t + direction * h - target) >= 0.0) {
            h = std::abs(target - t);
            lands = true;
        }
        const double hs = direction * h;

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k[0][i];
        rhs(t + c2 * hs, tmp, k[1]);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k[0][i] + a32 * k[1][i]);
        rhs(t + c3 * hs, tmp, k[2]);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        rhs(t + c4 * hs, tmp, k[3]);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
        rhs(t + c5 * hs, tmp, k[4]);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                                  a65 * k[4][i]);
        rhs(t + hs, tmp, k[5]);
        for (std::size_t i = 0; i < n; ++i)
            y_new[i] = y[i] + hs * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                                    b6 * k[5][i]);
        const double t_new = lands ? target : t + hs;
        rhs(t_new, y_new, k[6]);
        for (int s = 1; s < 7; ++s) check_finite(k[s], t);

        for (std::size_t i = 0; i < n; ++i)
            err[i] = hs * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                           e6 * k[5][i] + e7 * k[6][i]);
        double err_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err_norm = std::max(err_norm, std::abs(err[i]) / sc);
        }
        if (!std::isfinite(err_norm))
            fail(ErrorKind::NonFiniteRhs, "error estimate is not finite at t=" + std::to_string(t));

        if (err_norm <= 1.0) {
            double factor = err_norm == 0.0
                                ? kMaxFactor
                                : kSafety * std::pow(err_norm, -kAlpha) * std::pow(err_old, kBeta);
            factor = std::clamp(factor, kMinFactor, kMaxFactor);
            if (last_rejected) factor = std::min(factor, 1.0);
            err_old = std::max(err_norm, 1e-4);
            last_rejected = false;

            t = t_new;
            y.swap(y_new);
            std::swap(k[0], k[6]);
            ++result.accepted_steps;

            if (sampling) {
                if (lands && next_sample < o.sample_at.size()) {
                    record(t, y);
                    ++next_sample;
                }
            } else {
                record(t, y);
            }
            if (observer && observer(t, y)) {
                result.stopped = true;
                break;
            }
            // A step shortened to land on a sample should not shrink the next one.
            const double grown = h * factor;
            h = std::min(lands ? std::max(grown, h_proposed) : grown, o.max_step);
        } else {
            ++result.rejected_steps;
            last_rejected = true;
            h *= std::max(kMinFactor, kSafety * std::pow(err_norm, -1.0 / 5.0));
        }
    }

    result.terminal = y;
    result.t_final = t;
    return result;
}

}  // namespace segwave
