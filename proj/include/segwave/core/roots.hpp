#pragma once

#include <functional>

namespace segwave {

/// Closed interval [lo, hi] on which f changes sign (or vanishes at an end).
struct RootBracket {
    double lo;
    double hi;
    double f_lo;
    double f_hi;

    bool valid() const noexcept { return lo < hi && f_lo * f_hi <= 0.0; }
};

/// Evaluates f at both ends and returns the bracket.
RootBracket make_bracket(const std::function<double(double)>& f, double lo, double hi);

struct BisectOptions {
    double x_tol = 1e-12;
    double f_tol = 1e-12;
    int max_iterations = 400;
};

/// Bisection inside `bracket`. Stops once |f(x)| <= f_tol or the bracket
/// width is <= x_tol, returning the midpoint of the final bracket (or the
/// point where |f| <= f_tol). f is never evaluated outside the bracket.
/// Throws NoSignChange if the initial bracket is invalid.
double bisect_root(const std::function<double(double)>& f, RootBracket bracket,
                   const BisectOptions& options = {});

}  // namespace segwave
