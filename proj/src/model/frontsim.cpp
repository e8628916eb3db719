#include "segwave/frontsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segwave/core/tridiagonal.hpp"
#include "segwave/error.hpp"
#include "segwave/simd/kernels.hpp"

namespace segwave::pde {
namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kReactionStep = 0.5;
constexpr double kEquilibriumSnap = 1e-6;

int reaction_substeps(double dt, const SystemParams& p) {
    const double rate = std::max({1.0, p.r, p.k, p.alpha * p.k});
    return std::max(1, static_cast<int>(std::ceil(dt * rate / kReactionStep)));
}

// Backward-Euler diffusion with zero-flux ends, one species at a time.
class Diffusion {
public:
    Diffusion(std::size_t n, double a) : sub_(n - 1, -a), diag_(n, 1.0 + 2.0 * a), sup_(n - 1, -a), scratch_(n) {
        sup_.front() = -2.0 * a;
        sub_.back() = -2.0 * a;
    }
    void apply(std::vector<double>& x) { solve_tridiagonal_inplace(sub_, diag_, sup_, x, scratch_); }

private:
    std::vector<double> sub_, diag_, sup_, scratch_;
};

class Stepper {
public:
    Stepper(const Grid1D& grid, double dt, const SystemParams& p)
        : dt_(dt),
          params_(p),
          substeps_(reaction_substeps(dt, p)),
          du_(grid.size(), dt / (grid.spacing() * grid.spacing())),
          dv_(grid.size(), p.d * dt / (grid.spacing() * grid.spacing())) {}

    void advance(PdeState& s) {
        simd::kernels().reaction(s.u.data(), s.v.data(), s.u.size(), dt_, substeps_, params_.k,
                                 params_.alpha, params_.r);
        du_.apply(s.u);
        dv_.apply(s.v);
        s.time += dt_;
        check(s);
    }

private:
    static void check(const PdeState& s) {
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            const bool ok = s.u[i] >= -kBoundSlack && s.u[i] <= 1.0 + kBoundSlack &&
                            s.v[i] >= -kBoundSlack && s.v[i] <= 1.0 + kBoundSlack;
            if (!ok)
                fail(ErrorKind::StabilityViolation,
                     "state left [0, 1] at x=" + std::to_string(s.grid.at(i)) +
                         " t=" + std::to_string(s.time) + " (u=" + std::to_string(s.u[i]) +
                         ", v=" + std::to_string(s.v[i]) + ")");
        }
    }

    double dt_;
    SystemParams params_;
    int substeps_;
    Diffusion du_, dv_;
};

// Crossing in cell units from the left end, for a front of either orientation.
bool crossing_index(const std::vector<double>& f, double level, double& index) {
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double a = f[i] - level;
        const double b = f[i + 1] - level;
        if (a == 0.0) {
            index = static_cast<double>(i);
            return true;
        }
        if ((a < 0.0) != (b < 0.0)) {
            index = static_cast<double>(i) + a / (a - b);
            return true;
        }
    }
    return false;
}

bool is_monotone(const std::vector<double>& f, bool decreasing) {
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (decreasing ? f[i] > f[i - 1] + kBoundSlack : f[i] < f[i - 1] - kBoundSlack) return false;
    }
    return true;
}

// Moves the window by `cells` (positive: right). Exposed cells take the
// equilibrium value (0 or 1) the edge is within 1e-6 of, and copy the edge
// otherwise. A copied tail would grow logistically as it is swept toward a
// pulled front and ignite it early.
void shift_window(PdeState& s, long cells) {
    const long n = static_cast<long>(s.u.size());
    auto shift = [&](std::vector<double>& f) {
        const double edge = f[cells > 0 ? n - 1 : 0];
        double fill = edge;
        if (std::abs(edge) <= kEquilibriumSnap) fill = 0.0;
        else if (std::abs(1.0 - edge) <= kEquilibriumSnap) fill = 1.0;
        std::vector<double> g(f.size(), fill);
        for (long i = 0; i < n; ++i) {
            const long j = i + cells;
            if (j >= 0 && j < n) g[i] = f[j];
        }
        f.swap(g);
    };
    shift(s.u);
    shift(s.v);
    s.grid = s.grid.shifted(static_cast<double>(cells) * s.grid.spacing());
}

}  // namespace

PdeState::PdeState(Grid1D g, std::vector<double> uu, std::vector<double> vv, double t)
    : grid(g), u(std::move(uu)), v(std::move(vv)), time(t) {
    require(u.size() == grid.size() && v.size() == grid.size(), ErrorKind::InvalidArgument,
            "state arrays do not match the grid");
    require(time >= 0.0, ErrorKind::InvalidArgument, "state time must be non-negative");
    for (std::size_t i = 0; i < u.size(); ++i)
        require(u[i] >= 0.0 && u[i] <= 1.0 + 1e-12 && v[i] >= 0.0 && v[i] <= 1.0 + 1e-12,
                ErrorKind::InvalidArgument, "state values must lie in [0, 1]");
}

PdeState step_state(const Grid1D& grid, bool with_u, bool with_v, double interface) {
    const std::size_t n = grid.size();
    std::vector<double> u(n, 0.0), v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.at(i);
        const double hu = x < interface ? 1.0 : (x == interface ? 0.5 : 0.0);
        if (with_u) u[i] = hu;
        if (with_v) v[i] = 1.0 - hu;
    }
    return PdeState(grid, std::move(u), std::move(v));
}

PdeState wave_state(const Grid1D& grid, const wave::TravellingWave& w, double center) {
    const std::size_t n = grid.size();
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::clamp(w.u_at(grid.at(i) - center), 0.0, 1.0);
        v[i] = std::clamp(w.v_at(grid.at(i) - center), 0.0, 1.0);
    }
    return PdeState(grid, std::move(u), std::move(v));
}

PdeState step(const PdeState& state, double dt, const SystemParams& params) {
    params.validate();
    require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidArgument, "time step must be positive");
    PdeState next = state;
    Stepper(state.grid, dt, params).advance(next);
    return next;
}

FrontSpeedEstimate measure_front_speed(const PdeState& initial, const SystemParams& params,
                                       double t_end, double level, const FrontOptions& o) {
    params.validate();
    require(t_end > 0.0 && std::isfinite(t_end), ErrorKind::InvalidArgument, "t_end must be positive");
    require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must lie in (0, 1)");
    require(o.dt > 0.0 && o.sample_every >= o.dt, ErrorKind::InvalidArgument,
            "sampling interval must be at least one time step");

    Tracked tracked = o.tracked;
    if (tracked == Tracked::Auto) {
        const double umax = *std::max_element(initial.u.begin(), initial.u.end());
        tracked = umax >= level ? Tracked::U : Tracked::V;
    }
    const bool track_u = tracked == Tracked::U;

    PdeState s = initial;
    Stepper stepper(s.grid, o.dt, params);
    const double h = s.grid.spacing();
    const auto steps_per_sample = static_cast<long>(std::llround(o.sample_every / o.dt));
    const auto n_samples = static_cast<long>(std::floor(t_end / o.sample_every + 1e-9));
    const double window_center = 0.5 * static_cast<double>(s.u.size() - 1);

    FrontSpeedEstimate est{level, {}, {}, 0.0, 0.0, true, tracked};
    auto sample = [&]() {
        const auto& f = track_u ? s.u : s.v;
        double index = 0.0;
        if (!crossing_index(f, level, index))
            fail(ErrorKind::FrontLost, "no level-" + std::to_string(level) + " crossing at t=" +
                                           std::to_string(s.time));
        est.times.push_back(s.time);
        est.positions.push_back(s.grid.left() + index * h);
        if (!is_monotone(s.u, true) || !is_monotone(s.v, false)) est.monotone = false;
        if (o.on_sample) o.on_sample(s);
        if (o.recenter) {
            const double offset = index - window_center;
            if (std::abs(offset) > 0.125 * window_center)
                shift_window(s, static_cast<long>(std::lround(offset)));
        }
    };

    sample();
    for (long k = 1; k <= n_samples; ++k) {
        for (long j = 0; j < steps_per_sample; ++j) stepper.advance(s);
        sample();
    }

    // Least-squares line through the trailing half of the samples.
    const std::size_t first = est.times.size() / 2;
    const std::size_t m = est.times.size() - first;
    require(m >= 2, ErrorKind::InvalidArgument, "too few samples for a speed fit");
    double tm = 0.0, xm = 0.0;
    for (std::size_t i = first; i < est.times.size(); ++i) {
        tm += est.times[i];
        xm += est.positions[i];
    }
    tm /= static_cast<double>(m);
    xm /= static_cast<double>(m);
    double stt = 0.0, stx = 0.0;
    for (std::size_t i = first; i < est.times.size(); ++i) {
        stt += (est.times[i] - tm) * (est.times[i] - tm);
        stx += (est.times[i] - tm) * (est.positions[i] - xm);
    }
    est.fitted_speed = stx / stt;
    double ss = 0.0;
    for (std::size_t i = first; i < est.times.size(); ++i) {
        const double e = est.positions[i] - (xm + est.fitted_speed * (est.times[i] - tm));
        ss += e * e;
    }
    est.fit_residual = std::sqrt(ss / static_cast<double>(m));
    return est;
}

double compare_with_wave(const SystemParams& params, const wave::TravellingWave& w, double t_end,
                         const FrontOptions& options, double dx) {
    const auto n = static_cast<std::size_t>(std::llround(400.0 / dx)) + 1;
    const Grid1D grid(-200.0, 200.0, n);
    FrontOptions o = options;
    o.tracked = Tracked::U;
    const auto est = measure_front_speed(wave_state(grid, w), params, t_end, 0.5, o);
    return std::abs(est.fitted_speed - w.c);
}

}  // namespace segwave::pde
