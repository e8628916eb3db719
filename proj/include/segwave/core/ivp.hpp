#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace segwave {

/// Right-hand side y' = f(t, y); writes f into `dydt`.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Called after every accepted step; returning true stops the integration.
using StepObserver = std::function<bool(double t, std::span<const double> y)>;

struct IvpOptions {
    /// Per-component local error bound is atol + rtol * |y|.
    double rtol = 1e-10;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 selects a step automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
    /// Optional output abscissae (monotone in the direction of integration).
    /// The integrator lands on each exactly and records only these samples.
    std::vector<double> sample_at;
};

struct IvpResult {
    std::vector<double> t;
    std::vector<double> y;  // row-major, t.size() x dimension
    std::vector<double> terminal;
    double t_final = 0.0;
    bool stopped = false;  // observer requested the stop
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    std::size_t dimension() const noexcept { return terminal.size(); }
    std::span<const double> state(std::size_t i) const {
        return std::span<const double>(y).subspan(i * dimension(), dimension());
    }
};

/// Adaptive Dormand-Prince 5(4) integration with PI step-size control.
/// Throws StepUnderflow when the step collapses below 1e-12 of the span and
/// NonFiniteRhs when f produces a non-finite value.
IvpResult integrate_ivp(const OdeRhs& rhs, std::span<const double> y0, double t0, double t1,
                        const IvpOptions& options = {}, const StepObserver& observer = {});

}  // namespace segwave
