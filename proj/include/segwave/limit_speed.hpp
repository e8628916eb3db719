#pragma once

// Infinite-competition limit. The limit speed c is the unique root of
//   alpha * gamma(-c) = sqrt(r d) * gamma(c / sqrt(r d)),   c in (-2 sqrt(rd), 2),
// and the segregated limit profiles are rescaled half-line solutions joined
// at xi = 0 under the flux condition alpha u'(0-) + d v'(0+) = 0.

#include <string>

#include "segwave/core/grid.hpp"
#include "segwave/halfline.hpp"

namespace segwave::limit {

/// Margin kept from both ends of the admissible speed interval.
inline constexpr double kBracketMargin = 1e-6;
/// |c| below this is reported as a standoff.
inline constexpr double kStandoffTolerance = 1e-9;

struct LimitParams {
    double alpha = 1.0;
    double r = 1.0;
    double d = 1.0;

    void validate() const;
    /// Speed of the lone v front, 2 sqrt(rd).
    double v_speed() const;
    /// alpha^2 / r: the diffusion ratio at which neither species invades.
    double threshold() const { return alpha * alpha / r; }
};

struct LimitWave {
    LimitParams params;
    double c;
    Profile u_profile;  // on [-L_u, 0]
    Profile v_profile;  // on [0, L_v]
    double u_slope;     // u'(0-), one-sided estimate
    double v_slope;     // v'(0+), one-sided estimate
    double interface_residual;  // |alpha u'(0-) + d v'(0+)|

    /// Segregated extension to the whole line: u vanishes right of 0, v left of 0.
    double u(double xi) const;
    double v(double xi) const;
};

enum class Invader { UInvades, VInvades, Standoff };

const char* to_string(Invader tag) noexcept;

struct InvaderVerdict {
    Invader tag;
    double c;
    double threshold;
};

struct LimitOptions {
    double c_tol = 1e-10;
    halfline::GammaOptions gamma;
    /// Optional shared memo table; must have been built with the same gamma options.
    halfline::GammaCache* cache = nullptr;
};

/// alpha gamma(-c) - sqrt(rd) gamma(c / sqrt(rd)); strictly decreasing in c.
/// Depends on (r, d) only through their product.
double interface_relation_residual(double c, const LimitParams& params,
                                   const LimitOptions& options = {});

double solve_limit_speed(const LimitParams& params, const LimitOptions& options = {});

InvaderVerdict classify_invader(const LimitParams& params, const LimitOptions& options = {});

/// Rebuilds both limit profiles for a speed that satisfies the interface
/// relation to 1e-8. The u side spans 40 units and the v side 40 sqrt(d/r);
/// both are extended when the half-line profile has not saturated.
LimitWave build_limit_profiles(const LimitParams& params, double c,
                               const LimitOptions& options = {});

/// |c(alpha, r1, d1) - c(alpha, r2, d2)| for r1 d1 = r2 d2.
double speed_invariance_check(double alpha, double r1, double d1, double r2, double d2,
                              const LimitOptions& options = {});

}  // namespace segwave::limit
