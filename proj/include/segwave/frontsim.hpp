#pragma once

// Direct simulation of
//   u_t = u_xx + u(1-u) - k u v
//   v_t = d v_xx + r v(1-v) - alpha k u v
// with zero-flux ends: implicit diffusion, sub-stepped explicit reaction.

#include <functional>
#include <vector>

#include "segwave/core/grid.hpp"
#include "segwave/wave.hpp"

namespace segwave::pde {

using wave::SystemParams;

struct PdeState {
    Grid1D grid;
    std::vector<double> u;
    std::vector<double> v;
    double time = 0.0;

    PdeState(Grid1D grid, std::vector<double> u, std::vector<double> v, double time = 0.0);
};

/// Step data: u = 1 left of `interface` (if present), v = 1 right of it.
PdeState step_state(const Grid1D& grid, bool with_u, bool with_v, double interface = 0.0);
/// Wave profiles placed on the grid, centered at `center`.
PdeState wave_state(const Grid1D& grid, const wave::TravellingWave& wave, double center = 0.0);

/// One IMEX step of length dt. Throws StabilityViolation when a value leaves
/// [-1e-9, 1 + 1e-9].
PdeState step(const PdeState& state, double dt, const SystemParams& params);

enum class Tracked { Auto, U, V };

struct FrontOptions {
    double dt = 0.02;
    double sample_every = 1.0;
    Tracked tracked = Tracked::Auto;
    /// Keep the front near the middle of the domain by shifting whole cells.
    bool recenter = true;
    /// Called with the state at every sample time.
    std::function<void(const PdeState&)> on_sample;
};

struct FrontSpeedEstimate {
    double level;
    std::vector<double> times;
    std::vector<double> positions;
    double fitted_speed;
    /// RMS deviation of the fitted positions.
    double fit_residual;
    /// Every sampled profile was monotone in the front direction.
    bool monotone;
    /// Which species was tracked (U unless u vanishes).
    Tracked tracked;
};

/// Least-squares speed of the level crossing over the second half of [0, t_end].
FrontSpeedEstimate measure_front_speed(const PdeState& initial, const SystemParams& params,
                                       double t_end, double level = 0.5,
                                       const FrontOptions& options = {});

/// |PDE speed - wave.c| starting from the wave itself on a 400-wide domain.
double compare_with_wave(const SystemParams& params, const wave::TravellingWave& wave,
                         double t_end, const FrontOptions& options = {}, double dx = 0.1);

}  // namespace segwave::pde
