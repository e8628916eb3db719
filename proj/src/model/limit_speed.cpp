#include "segwave/limit_speed.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "segwave/core/roots.hpp"
#include "segwave/error.hpp"

namespace segwave::limit {
namespace {

constexpr double kRelationTolerance = 1e-8;
constexpr double kMaxProfileLength = 640.0;

double cached_gamma(double c, const LimitOptions& o) {
    if (o.cache) return o.cache->gamma(c);
    return halfline::gamma(c, o.gamma);
}

// Half-line solution on the shortest length >= base that saturates.
halfline::HalfLineSolution saturated_halfline(double c, double base, const LimitOptions& o) {
    for (double length = base;; length *= 2.0) {
        try {
            halfline::HalfLineProblem p;
            p.c = c;
            p.domain_length = length;
            p.tol = o.gamma.tube_tol;
            return halfline::solve_halfline(p, 0, o.gamma);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DomainViolation || length * 2.0 > kMaxProfileLength) throw;
        }
    }
}

}  // namespace

void LimitParams::validate() const {
    auto ok = [](double x) { return std::isfinite(x) && x > 0.0; };
    require(ok(alpha) && ok(r) && ok(d), ErrorKind::InvalidArgument,
            "limit parameters must be positive and finite (alpha=" + std::to_string(alpha) +
                ", r=" + std::to_string(r) + ", d=" + std::to_string(d) + ")");
}

double LimitParams::v_speed() const { return 2.0 * std::sqrt(r * d); }

double LimitWave::u(double xi) const { return xi >= 0.0 ? 0.0 : u_profile.interpolate(xi); }

double LimitWave::v(double xi) const { return xi <= 0.0 ? 0.0 : v_profile.interpolate(xi); }

const char* to_string(Invader tag) noexcept {
    switch (tag) {
        case Invader::UInvades: return "UInvades";
        case Invader::VInvades: return "VInvades";
        case Invader::Standoff: return "Standoff";
    }
    return "?";
}

double interface_relation_residual(double c, const LimitParams& params, const LimitOptions& options) {
    params.validate();
    const double s = std::sqrt(params.r * params.d);
    const double arg_u = -c;
    const double arg_v = c / s;
    if (!(arg_u > halfline::kMinDrift) || !(arg_v > halfline::kMinDrift))
        fail(ErrorKind::DomainViolation,
             "speed c=" + std::to_string(c) + " outside (" + std::to_string(-2.0 * s) + ", 2)");
    return params.alpha * cached_gamma(arg_u, options) - s * cached_gamma(arg_v, options);
}

double solve_limit_speed(const LimitParams& params, const LimitOptions& options) {
    params.validate();
    const double s = std::sqrt(params.r * params.d);
    const double lo = -2.0 * s + kBracketMargin;
    const double hi = 2.0 - kBracketMargin;
    auto f = [&](double c) { return interface_relation_residual(c, params, options); };
    const RootBracket br = make_bracket(f, lo, hi);
    if (!(br.f_lo > 0.0 && br.f_hi < 0.0))
        fail(ErrorKind::BracketFailure,
             "interface relation does not change sign on [" + std::to_string(lo) + ", " +
                 std::to_string(hi) + "]: f=" + std::to_string(br.f_lo) + ", " +
                 std::to_string(br.f_hi));
    BisectOptions bo;
    bo.x_tol = options.c_tol;
    bo.f_tol = 0.0;
    return bisect_root(f, br, bo);
}

InvaderVerdict classify_invader(const LimitParams& params, const LimitOptions& options) {
    const double c = solve_limit_speed(params, options);
    Invader tag = Invader::Standoff;
    if (c > kStandoffTolerance) tag = Invader::UInvades;
    else if (c < -kStandoffTolerance) tag = Invader::VInvades;
    return {tag, c, params.threshold()};
}

LimitWave build_limit_profiles(const LimitParams& params, double c, const LimitOptions& options) {
    params.validate();
    const double rel = interface_relation_residual(c, params, options);
    require(std::abs(rel) <= kRelationTolerance, ErrorKind::InvalidArgument,
            "speed " + std::to_string(c) + " does not solve the interface relation (residual " +
                std::to_string(rel) + ")");
    const double s = std::sqrt(params.r * params.d);
    const double stretch = std::sqrt(params.d / params.r);

    // u(xi) = y_{-c}(-xi): reverse the half-line profile onto [-L, 0].
    const auto yu = saturated_halfline(-c, halfline::kDefaultLength, options);
    const auto yu_vals = yu.profile.values();
    const std::size_t nu = yu_vals.size();
    std::vector<double> u(nu);
    for (std::size_t i = 0; i < nu; ++i) u[i] = yu_vals[nu - 1 - i];
    const Grid1D ugrid(-yu.profile.grid().right(), 0.0, nu);

    // v(xi) = y_{c/s}(xi / stretch): same values on a stretched grid.
    const auto yv = saturated_halfline(c / s, halfline::kDefaultLength, options);
    const auto yv_vals = yv.profile.values();
    const Grid1D vgrid(0.0, yv.profile.grid().right() * stretch, yv_vals.size());

    LimitWave w{params,
                c,
                Profile(ugrid, std::move(u)),
                Profile(vgrid, std::vector<double>(yv_vals.begin(), yv_vals.end())),
                0.0,
                0.0,
                0.0};
    w.u_slope = derivative_right_end(w.u_profile.values(), ugrid.spacing());
    w.v_slope = derivative_left_end(w.v_profile.values(), vgrid.spacing());
    w.interface_residual = std::abs(params.alpha * w.u_slope + params.d * w.v_slope);
    return w;
}

double speed_invariance_check(double alpha, double r1, double d1, double r2, double d2,
                              const LimitOptions& options) {
    require(std::abs(r1 * d1 - r2 * d2) <= 1e-12 * std::max(1.0, std::abs(r1 * d1)),
            ErrorKind::InvalidArgument, "parameter pairs must share the product r d");
    const double c1 = solve_limit_speed({alpha, r1, d1}, options);
    const double c2 = solve_limit_speed({alpha, r2, d2}, options);
    return std::abs(c1 - c2);
}

}  // namespace segwave::limit
