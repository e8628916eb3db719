#include "segwave/halfline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "segwave/core/ivp.hpp"
#include "segwave/core/roots.hpp"
#include "segwave/core/tridiagonal.hpp"
#include "segwave/error.hpp"

namespace segwave::halfline {
namespace {

// Slopes at or above this are integrated from xi = 0. Smaller ones follow the
// linearization about y = 0 analytically until y reaches kLaunchAmplitude;
// the neglected y^2 term is a relative perturbation of at most that size.
constexpr double kDirectSlope = 1e-7;
constexpr double kLaunchAmplitude = 1e-7;
const double kLogDirectSlope = std::log(kDirectSlope);
const double kLogLaunchAmplitude = std::log(kLaunchAmplitude);

// Distance from the saturated state where backward profile integration starts;
// the linear tail beyond it is exact to O(kTailStart^2).
constexpr double kTailStart = 1e-9;
// Backward profile legs switch from w = 1 - y to y at this w.
constexpr double kLegSwitch = 0.5;
// A profile whose last value is further than this from 1 is truncated.
constexpr double kTailTolerance = 1e-3;

constexpr double kShotRtol = 1e-12;

void check_drift(double c) {
    if (!(c > kMinDrift) || !std::isfinite(c))
        fail(ErrorKind::ExistenceViolation,
             "half-line problem has no positive solution for drift c=" + std::to_string(c) +
                 " (requires c > -2)");
}

double log_sinh(double x) {
    if (x > 20.0) return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
    return std::log(std::sinh(x));
}

// phi'' + c phi' + phi = 0, phi(0) = 0, phi'(0) = 1: the linearization of the
// shooting equation about y = 0, scaled by the initial slope.
class LinearPhase {
public:
    explicit LinearPhase(double c) : c_(c) {
        check_drift(c);
        const double disc = c * c / 4.0 - 1.0;
        if (std::abs(disc) < 1e-14) {
            regime_ = Regime::Critical;
            xi_peak_ = 1.0;
        } else if (disc < 0.0) {
            regime_ = Regime::Oscillatory;
            rate_ = std::sqrt(-disc);
            xi_peak_ = std::atan2(2.0 * rate_, c) / rate_;
        } else {
            regime_ = Regime::Overdamped;
            rate_ = std::sqrt(disc);
            xi_peak_ = std::atanh(2.0 * rate_ / c) / rate_;
        }
        log_phi_peak_ = log_phi(xi_peak_);
    }

    double xi_peak() const { return xi_peak_; }
    double log_phi_peak() const { return log_phi_peak_; }

    double log_phi(double xi) const {
        switch (regime_) {
            case Regime::Oscillatory:
                return -0.5 * c_ * xi + std::log(std::sin(rate_ * xi) / rate_);
            case Regime::Critical: return -xi + std::log(xi);
            case Regime::Overdamped: return -0.5 * c_ * xi + log_sinh(rate_ * xi) - std::log(rate_);
        }
        return 0.0;
    }

    // phi'/phi
    double log_derivative(double xi) const {
        switch (regime_) {
            case Regime::Oscillatory:
                return -0.5 * c_ + rate_ * std::cos(rate_ * xi) / std::sin(rate_ * xi);
            case Regime::Critical: return -1.0 + 1.0 / xi;
            case Regime::Overdamped: return -0.5 * c_ + rate_ / std::tanh(rate_ * xi);
        }
        return 0.0;
    }

private:
    enum class Regime { Oscillatory, Critical, Overdamped };
    double c_;
    Regime regime_ = Regime::Oscillatory;
    double rate_ = 0.0;
    double xi_peak_ = 0.0;
    double log_phi_peak_ = 0.0;
};

struct Launch {
    bool turns_back = false;  // linear phase peaks below the launch amplitude
    double xi = 0.0;
    double y = 0.0;
    double slope = 0.0;
};

Launch launch(const LinearPhase& lp, double log_slope) {
    Launch l;
    if (log_slope >= kLogDirectSlope) {
        l.slope = std::exp(log_slope);
        return l;
    }
    if (log_slope + lp.log_phi_peak() <= kLogLaunchAmplitude) {
        l.turns_back = true;
        return l;
    }
    auto f = [&](double xi) { return log_slope + lp.log_phi(xi) - kLogLaunchAmplitude; };
    const double lo = lp.xi_peak() * 1e-300 > 0.0 ? lp.xi_peak() * 1e-300 : 1e-300;
    RootBracket br{lo, lp.xi_peak(), f(lo), f(lp.xi_peak())};
    BisectOptions bo;
    bo.x_tol = lp.xi_peak() * 1e-15;
    bo.f_tol = 1e-15;
    l.xi = bisect_root(f, br, bo);
    l.y = kLaunchAmplitude;
    l.slope = l.y * lp.log_derivative(l.xi);
    return l;
}

struct SaddleRates {
    double unstable;
    double stable;
};

// Roots of mu^2 + c mu - 1 = 0: linearization about the saturated state.
SaddleRates saddle_rates(double c) {
    const double s = std::sqrt(c * c + 4.0);
    if (c >= 0.0) return {2.0 / (c + s), -0.5 * (c + s)};
    return {0.5 * (s - c), -2.0 / (s - c)};
}

// Sign of the unstable-mode coefficient of (y - 1, y') near the saddle.
int lean(double c, double y, double p) {
    const SaddleRates m = saddle_rates(c);
    const double a = p - m.stable * (y - 1.0);
    return a > 0.0 ? 1 : (a < 0.0 ? -1 : 0);
}

OdeRhs shooting_rhs(double c) {
    return [c](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -c * y[1] - y[0] * (1.0 - y[0]);
    };
}

IvpOptions shot_options(const Launch& l) {
    IvpOptions o;
    o.rtol = kShotRtol;
    o.atol = 1e-15 * std::min(1.0, std::max(l.y, l.slope));
    o.max_step = 1.0;
    return o;
}

struct ShotOutcome {
    ShotClass cls;
    int side;  // -1 undershoot side, +1 overshoot side, 0 on the stable manifold
};

ShotOutcome run_shot(const LinearPhase& lp, double c, double log_slope, double length,
                     double tol) {
    require(length > 0.0, ErrorKind::InvalidArgument, "shooting length must be positive");
    require(tol > 0.0, ErrorKind::InvalidArgument, "tube tolerance must be positive");
    const Launch l = launch(lp, log_slope);
    if (l.turns_back) return {ShotClass::Undershoot, -1};

    ShotOutcome out{ShotClass::Converged, 0};
    bool classified = false;
    auto observer = [&](double, std::span<const double> s) {
        const double y = s[0];
        const double p = s[1];
        if (std::abs(y - 1.0) < tol && std::abs(p) < tol) {
            out = {ShotClass::Converged, lean(c, y, p)};
            classified = true;
        } else if (p <= 0.0 && y < 1.0 - tol) {
            out = {ShotClass::Undershoot, -1};
            classified = true;
        } else if (y > 1.0 + tol && p > 0.0) {
            out = {ShotClass::Overshoot, 1};
            classified = true;
        }
        return classified;
    };
    const double y0[2] = {l.y, l.slope};
    IvpResult r;
    try {
        r = integrate_ivp(shooting_rhs(c), y0, l.xi, l.xi + length, shot_options(l), observer);
    } catch (const Error& e) {
        fail(ErrorKind::IntegrationFailure, std::string("shooting integration failed: ") + e.what());
    }
    if (!classified) {
        // Still near the saddle at the horizon: the unstable component decides.
        const int s = lean(c, r.terminal[0], r.terminal[1]);
        out = {s >= 0 ? ShotClass::Overshoot : ShotClass::Undershoot, s};
        if (s == 0) out.cls = ShotClass::Converged;
    }
    return out;
}

bool bracket_done(double log_lo, double log_hi, double slope_tol) {
    const double rel = std::expm1(log_hi - log_lo);
    if (log_lo >= 0.0) return std::exp(log_lo) * rel <= slope_tol;
    return rel <= slope_tol;
}

}  // namespace

const char* to_string(ShotClass s) noexcept {
    switch (s) {
        case ShotClass::Undershoot: return "Undershoot";
        case ShotClass::Overshoot: return "Overshoot";
        case ShotClass::Converged: return "Converged";
    }
    return "?";
}

ShotClass classify_log_shot(double c, double log_slope, double length, double tol) {
    const LinearPhase lp(c);
    return run_shot(lp, c, log_slope, length, tol).cls;
}

ShotClass classify_shot(double c, double slope, double length, double tol) {
    require(slope > 0.0 && std::isfinite(slope), ErrorKind::InvalidArgument,
            "initial slope must be positive");
    return classify_log_shot(c, std::log(slope), length, tol);
}

double GammaBracket::width() const noexcept { return std::exp(log_hi) - std::exp(log_lo); }

GammaBracket gamma_bracket(double c, const GammaOptions& o) {
    require(o.slope_tol > 0.0, ErrorKind::InvalidArgument, "slope tolerance must be positive");
    const LinearPhase lp(c);
    auto side = [&](double ls) { return run_shot(lp, c, ls, o.length, o.tube_tol).side; };

    // The c = 0 first integral gives y'(0) = 1/sqrt(3); start there.
    const double start = -0.5 * std::log(3.0);
    double lo = start;
    double hi = start;
    const int s0 = side(start);
    if (s0 == 0) return {start, start};
    if (s0 > 0) {
        const double turn_back = kLogLaunchAmplitude - lp.log_phi_peak() - 1.0;
        double step = std::numbers::ln2;
        lo = start - step;
        for (int s = side(lo); s >= 0; s = side(lo)) {
            if (s == 0) return {lo, lo};
            // Below the analytic turn-back slope every shot is an undershoot,
            // so reaching it without one means the classifier is broken.
            if (lo <= turn_back)
                fail(ErrorKind::ExistenceViolation,
                     "no undershoot witness for c=" + std::to_string(c));
            hi = lo;
            if (lo < std::log(1e-8)) step *= 2.0;
            lo = std::max(lo - step, turn_back);
        }
    } else {
        const double cap = std::log(10.0 + 2.0 * std::max(c, 0.0));
        hi = start + std::numbers::ln2;
        for (int s = side(hi); s <= 0; s = side(hi)) {
            if (s == 0) return {hi, hi};
            lo = hi;
            hi += std::numbers::ln2;
            if (hi > cap)
                fail(ErrorKind::ExistenceViolation,
                     "no overshoot witness below slope " + std::to_string(std::exp(cap)) +
                         " for c=" + std::to_string(c));
        }
    }

    while (!bracket_done(lo, hi, o.slope_tol)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int s = side(mid);
        if (s == 0) return {mid, mid};
        (s < 0 ? lo : hi) = mid;
    }
    return {lo, hi};
}

double log_gamma(double c, const GammaOptions& options) {
    return gamma_bracket(c, options).log_gamma();
}

double gamma(double c, const GammaOptions& options) { return std::exp(log_gamma(c, options)); }

HalfLineSolution solve_halfline(const HalfLineProblem& problem, std::size_t n_points,
                                const GammaOptions& options) {
    check_drift(problem.c);
    const double length = problem.domain_length;
    require(length > 0.0 && std::isfinite(length), ErrorKind::InvalidArgument,
            "domain length must be positive");
    require(problem.tol > 0.0, ErrorKind::InvalidArgument, "tolerance must be positive");
    if (n_points == 0) {
        // Centered-difference truncation grows like c^4 h^2 for steep profiles.
        const double h = 0.01 / std::max(1.0, 0.5 * problem.c * problem.c);
        n_points = static_cast<std::size_t>(std::llround(length / h)) + 1;
    }

    GammaOptions go = options;
    go.length = length;
    go.tube_tol = problem.tol;
    const GammaBracket br = gamma_bracket(problem.c, go);
    const double log_slope = br.log_gamma();

    // The profile is rebuilt backward from the saturated state along its stable
    // manifold, which attracts in reverse time; forward shots diverge from it.
    // The leg near saturation runs in w = 1 - y so that relative error control
    // sees w itself rather than its rounding against 1.
    const double c = problem.c;
    const double mu = saddle_rates(c).stable;
    const double w0 = kTailStart;
    const double start[2] = {w0, -mu * w0};
    IvpOptions o;
    o.rtol = kShotRtol;
    o.atol = 1e-30;
    o.max_step = 1.0;
    const OdeRhs rhs_y = shooting_rhs(c);
    const OdeRhs rhs_w = [c](double, std::span<const double> s, std::span<double> ds) {
        ds[0] = -s[1];
        ds[1] = -c * s[1] - (1.0 - s[0]) * s[0];
    };
    const double horizon = -1e4;
    const IvpResult seek_w = integrate_ivp(rhs_w, start, 0.0, horizon, o,
                                           [](double, std::span<const double> s) { return s[0] >= kLegSwitch; });
    require(seek_w.stopped, ErrorKind::IntegrationFailure, "backward profile never leaves saturation");
    const double t_leg = seek_w.t_final;
    auto to_y = [](std::span<const double> s) { return std::vector<double>{1.0 - s[0], s[1]}; };
    const IvpResult seek_y = integrate_ivp(rhs_y, to_y(seek_w.terminal), t_leg, horizon, o,
                                           [](double, std::span<const double> s) { return s[0] <= 0.0; });
    require(seek_y.stopped, ErrorKind::IntegrationFailure, "backward profile never reaches y = 0");
    // Newton on the crossing time from the first state past it.
    double t_hit = seek_y.t_final;
    std::vector<double> s_hit = seek_y.terminal;
    for (int it = 0; it < 4 && s_hit[0] != 0.0; ++it) {
        const double t_next = t_hit - s_hit[0] / s_hit[1];
        if (t_next == t_hit) break;
        s_hit = integrate_ivp(rhs_y, s_hit, t_hit, t_next, o).terminal;
        t_hit = t_next;
    }
    const double span = -t_hit;

    const Grid1D grid(0.0, length, n_points);
    std::vector<double> y(n_points), dy(n_points);
    // Nodes past the start of the backward run lie on the linear tail.
    IvpOptions ow = o, oy = o;
    for (std::size_t i = n_points; i-- > 0;) {
        const double t = grid.at(i) - span;
        if (t > 0.0) {
            const double w = -w0 * std::exp(mu * t);
            y[i] = 1.0 + w;
            dy[i] = mu * w;
        } else if (t >= t_leg) {
            ow.sample_at.push_back(t);
        } else {
            oy.sample_at.push_back(i == 0 ? t_hit : t);
        }
    }
    std::size_t node = ow.sample_at.size() + oy.sample_at.size() - 1;
    const IvpResult leg_w = integrate_ivp(rhs_w, start, 0.0, t_leg, ow);
    for (std::size_t s = 0; s < leg_w.t.size(); ++s, --node) {
        y[node] = 1.0 - leg_w.state(s)[0];
        dy[node] = leg_w.state(s)[1];
    }
    if (!oy.sample_at.empty()) {
        const IvpResult leg_y = integrate_ivp(rhs_y, to_y(leg_w.terminal), t_leg, t_hit, oy);
        for (std::size_t s = 0; s < leg_y.t.size(); ++s, --node) {
            y[node] = leg_y.state(s)[0];
            dy[node] = leg_y.state(s)[1];
        }
    }
    require(node == static_cast<std::size_t>(-1) &&
                leg_w.t.size() == ow.sample_at.size(),
            ErrorKind::IntegrationFailure, "profile sampling incomplete");
    y[0] = 0.0;
    if (y.back() < 1.0 - kTailTolerance)
        fail(ErrorKind::DomainViolation, "profile has not saturated at L=" + std::to_string(length) +
                                             " (y(L)=" + std::to_string(y.back()) + ")");

    return HalfLineSolution{problem, std::exp(log_slope), Profile(grid, std::move(y)),
                            Profile(grid, std::move(dy)), br.width()};
}

double eigenvalue_dirichlet(double c, double l) {
    require(l > 0.0, ErrorKind::InvalidArgument, "interval length must be positive");
    return -1.0 + c * c / 4.0 + std::numbers::pi * std::numbers::pi / (l * l);
}

double principal_eigenvalue_numeric(double c, double l, std::size_t n) {
    require(l > 0.0, ErrorKind::InvalidArgument, "interval length must be positive");
    require(n >= 100, ErrorKind::InvalidArgument, "eigenvalue grid needs at least 100 intervals");
    const double h = l / static_cast<double>(n);
    const std::size_t m = n - 1;  // interior unknowns
    // The advection-diffusion part is positive on Dirichlet functions, so the
    // spectrum lies above -1 and a shift of -2 sits below all of it.
    const double shift = -2.0;
    std::vector<double> sub(m - 1, -1.0 / (h * h) + c / (2.0 * h));
    std::vector<double> sup(m - 1, -1.0 / (h * h) - c / (2.0 * h));
    std::vector<double> diag(m, 2.0 / (h * h) - 1.0 - shift);

    std::vector<double> x(m), y(m), scratch(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(n);
        x[i] = t * (1.0 - t);
    }
    double lambda = 0.0;
    for (int it = 0; it < 10'000; ++it) {
        double xx = 0.0;
        for (double v : x) xx += v * v;
        y = x;
        solve_tridiagonal_inplace(sub, diag, sup, y, scratch);
        double xy = 0.0;
        for (std::size_t i = 0; i < m; ++i) xy += x[i] * y[i];
        const double next = shift + xx / xy;
        double yy = 0.0;
        for (double v : y) yy += v * v;
        const double inv = 1.0 / std::sqrt(yy);
        for (std::size_t i = 0; i < m; ++i) x[i] = y[i] * inv;
        if (it > 0 && std::abs(next - lambda) <= 1e-13 * std::max(1.0, std::abs(next)))
            return next;
        lambda = next;
    }
    fail(ErrorKind::NoConvergence, "inverse iteration did not converge");
}

double GammaCache::gamma(double c) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = values_.find(c); it != values_.end()) return it->second;
    }
    const double g = halfline::gamma(c, options_);
    std::lock_guard lock(mutex_);
    values_.emplace(c, g);
    return g;
}

std::size_t GammaCache::size() const {
    std::lock_guard lock(mutex_);
    return values_.size();
}

}  // namespace segwave::halfline
