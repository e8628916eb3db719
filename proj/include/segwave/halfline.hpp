#pragma once

// Half-line KPP problem
//   -y'' - c y' = y (1 - y)  on (0, inf),  y(0) = 0,  y > 0,  y(inf) = 1,
// which has a unique solution for every drift c > -2. Its initial slope
// gamma(c) = y'(0) is increasing and continuous in c; the limit-speed relation
// is written in terms of this function.

#include <cstddef>
#include <map>
#include <mutex>

#include "segwave/core/grid.hpp"

namespace segwave::halfline {

/// Drift values at or below this threshold have no positive solution.
inline constexpr double kMinDrift = -2.0 + 1e-9;

inline constexpr double kDefaultLength = 40.0;

struct HalfLineProblem {
    double c = 0.0;
    double domain_length = kDefaultLength;
    /// Tube half-width around the saturated state (1, 0).
    double tol = 1e-8;
};

enum class ShotClass { Undershoot, Overshoot, Converged };

const char* to_string(ShotClass s) noexcept;

struct GammaOptions {
    double length = kDefaultLength;
    double tube_tol = 1e-8;
    /// Bisection stops once the slope bracket is narrower than
    /// slope_tol * min(1, slope), i.e. absolute above 1 and relative below.
    double slope_tol = 1e-12;
};

/// Integrates y'' = -c y' - y(1 - y) from (y, y') = (0, slope) and classifies
/// the trajectory: Undershoot when y' reaches 0 with y < 1 - tol, Overshoot
/// when y exceeds 1 + tol while rising, Converged when it enters the tube
/// |y - 1| < tol, |y'| < tol.
ShotClass classify_shot(double c, double slope, double length = kDefaultLength,
                        double tol = 1e-8);

/// Same classifier parameterized by log(slope), usable when the slope is too
/// small to represent. This is the form gamma() bisects on.
ShotClass classify_log_shot(double c, double log_slope, double length = kDefaultLength,
                            double tol = 1e-8);

struct GammaBracket {
    double log_lo;
    double log_hi;
    double log_gamma() const noexcept { return 0.5 * (log_lo + log_hi); }
    double width() const noexcept;  // hi - lo in slope units
};

/// Slope bisection between an Undershoot and an Overshoot witness.
GammaBracket gamma_bracket(double c, const GammaOptions& options = {});

/// log(gamma(c)); finite for every c > -2 + 1e-9 even when gamma underflows.
double log_gamma(double c, const GammaOptions& options = {});

/// gamma(c) = y_c'(0). Throws ExistenceViolation for c <= -2 + 1e-9. Returns 0
/// only when the true value is below the smallest representable double.
double gamma(double c, const GammaOptions& options = {});

struct HalfLineSolution {
    HalfLineProblem problem;
    double gamma;
    Profile profile;     // y on [0, L]
    Profile derivative;  // y' on the same grid
    double shot_slope_bracket_width;
};

/// Full profile on a uniform grid over [0, L]; default spacing
/// 0.01 / max(1, c^2 / 2).
HalfLineSolution solve_halfline(const HalfLineProblem& problem, std::size_t n_points = 0,
                                const GammaOptions& options = {});

/// Closed-form Dirichlet principal eigenvalue of -(phi'' + c phi' + phi) on (0, l).
double eigenvalue_dirichlet(double c, double l);

/// Smallest eigenvalue of the centered finite-difference discretization of
/// the same operator with n intervals, by shifted inverse power iteration.
double principal_eigenvalue_numeric(double c, double l, std::size_t n);

/// Memo table for gamma at fixed options, keyed by c. Safe to
/// share between threads; values depend only on the key, so concurrent use
/// cannot change results.
class GammaCache {
public:
    explicit GammaCache(GammaOptions options = {}) : options_(options) {}

    double gamma(double c);
    const GammaOptions& options() const noexcept { return options_; }
    std::size_t size() const;

private:
    GammaOptions options_;
    mutable std::mutex mutex_;
    std::map<double, double> values_;
};

}  // namespace segwave::halfline
