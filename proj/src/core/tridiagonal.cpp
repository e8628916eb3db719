#include "segwave/core/tridiagonal.hpp"

namespace segwave {

void solve_tridiagonal_inplace(std::span<const double> sub, std::span<const double> diag,
                               std::span<const double> sup, std::span<double> x,
                               std::span<double> scratch) {
    const std::size_t n = diag.size();
    require(n > 0 && x.size() == n && scratch.size() >= n && sub.size() + 1 == n &&
                sup.size() + 1 == n,
            ErrorKind::InvalidArgument, "tridiagonal dimensions are inconsistent");
    constexpr double kTiny = 1e-14;

    double pivot = diag[0];
    if (std::abs(pivot) <= kTiny) fail(ErrorKind::SingularPivot, "zero pivot at row 0");
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i - 1] = sup[i - 1] / pivot;
        pivot = diag[i] - sub[i - 1] * scratch[i - 1];
        if (std::abs(pivot) <= kTiny)
            fail(ErrorKind::SingularPivot, "zero pivot at row " + std::to_string(i));
        x[i] = (x[i] - sub[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i] * x[i + 1];
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs) {
    std::vector<double> x(rhs.begin(), rhs.end());
    std::vector<double> scratch(diag.size());
    solve_tridiagonal_inplace(sub, diag, sup, x, scratch);
    return x;
}

}  // namespace segwave
