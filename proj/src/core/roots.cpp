#include "segwave/core/roots.hpp"

#include <cmath>
#include <string>

#include "segwave/error.hpp"

namespace segwave {

RootBracket make_bracket(const std::function<double(double)>& f, double lo, double hi) {
    return RootBracket{lo, hi, f(lo), f(hi)};
}

double bisect_root(const std::function<double(double)>& f, RootBracket b,
                   const BisectOptions& o) {
    if (!b.valid() || !std::isfinite(b.f_lo) || !std::isfinite(b.f_hi))
        fail(ErrorKind::NoSignChange, "invalid bracket [" + std::to_string(b.lo) + ", " +
                                          std::to_string(b.hi) + "]");
    if (std::abs(b.f_lo) <= o.f_tol) return b.lo;
    if (std::abs(b.f_hi) <= o.f_tol) return b.hi;

    for (int it = 0; it < o.max_iterations && b.hi - b.lo > o.x_tol; ++it) {
        const double mid = b.lo + 0.5 * (b.hi - b.lo);
        if (mid <= b.lo || mid >= b.hi) break;  // bracket exhausted in floating point
        const double fm = f(mid);
        if (!std::isfinite(fm))
            fail(ErrorKind::NoSignChange, "function is not finite at " + std::to_string(mid));
        if (std::abs(fm) <= o.f_tol) return mid;
        if ((fm < 0.0) == (b.f_lo < 0.0)) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    return b.lo + 0.5 * (b.hi - b.lo);
}

}  // namespace segwave
