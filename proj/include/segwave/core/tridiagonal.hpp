#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segwave/error.hpp"

namespace segwave {

/// Thomas elimination for a tridiagonal system. `sub` and `sup` have n-1
/// entries: sub[i] multiplies x[i] in row i+1, sup[i] multiplies x[i+1] in
/// row i. Throws SingularPivot when a pivot magnitude drops to 1e-14.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup, std::span<const double> rhs);

/// In-place variant reusing caller-owned scratch (size n) for the modified
/// super-diagonal; `x` holds the rhs on entry and the solution on exit.
void solve_tridiagonal_inplace(std::span<const double> sub, std::span<const double> diag,
                               std::span<const double> sup, std::span<double> x,
                               std::span<double> scratch);

/// Dense row-major B x B block.
template <std::size_t B>
using Block = std::array<double, B * B>;

template <std::size_t B>
using BlockVector = std::array<double, B>;

namespace detail {

/// LU with partial pivoting of a small dense block; returns false if singular.
template <std::size_t B>
bool lu_factor(Block<B>& a, std::array<std::size_t, B>& perm) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-14 * (scale > 0.0 ? scale : 1.0);
    for (std::size_t i = 0; i < B; ++i) perm[i] = i;
    for (std::size_t col = 0; col < B; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < B; ++r)
            if (std::abs(a[r * B + col]) > std::abs(a[piv * B + col])) piv = r;
        if (std::abs(a[piv * B + col]) <= tiny) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < B; ++c) std::swap(a[piv * B + c], a[col * B + c]);
            std::swap(perm[piv], perm[col]);
        }
        for (std::size_t r = col + 1; r < B; ++r) {
            const double m = a[r * B + col] / a[col * B + col];
            a[r * B + col] = m;
            for (std::size_t c = col + 1; c < B; ++c) a[r * B + c] -= m * a[col * B + c];
        }
    }
    return true;
}

template <std::size_t B>
BlockVector<B> lu_solve(const Block<B>& lu, const std::array<std::size_t, B>& perm,
                        const BlockVector<B>& b) {
    BlockVector<B> x;
    for (std::size_t i = 0; i < B; ++i) {
        double s = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu[i * B + j] * x[j];
        x[i] = s;
    }
    for (std::size_t i = B; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < B; ++j) s -= lu[i * B + j] * x[j];
        x[i] = s / lu[i * B + i];
    }
    return x;
}

template <std::size_t B>
Block<B> lu_solve_block(const Block<B>& lu, const std::array<std::size_t, B>& perm,
                        const Block<B>& rhs) {
    Block<B> out;
    for (std::size_t c = 0; c < B; ++c) {
        BlockVector<B> col;
        for (std::size_t r = 0; r < B; ++r) col[r] = rhs[r * B + c];
        const auto x = lu_solve<B>(lu, perm, col);
        for (std::size_t r = 0; r < B; ++r) out[r * B + c] = x[r];
    }
    return out;
}

}  // namespace detail

/// Block Thomas elimination for a block-tridiagonal system with B x B blocks.
/// Row i reads sub[i-1] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i].
/// Each diagonal Schur complement is factored with partial pivoting; a
/// numerically singular one raises SingularPivot.
template <std::size_t B>
std::vector<BlockVector<B>> solve_block_tridiagonal(std::span<const Block<B>> sub,
                                                    std::span<const Block<B>> diag,
                                                    std::span<const Block<B>> sup,
                                                    std::span<const BlockVector<B>> rhs) {
    const std::size_t n = diag.size();
    require(n > 0 && rhs.size() == n && sub.size() + 1 == n && sup.size() + 1 == n,
            ErrorKind::InvalidArgument, "block tridiagonal dimensions are inconsistent");

    std::vector<Block<B>> upper(n > 1 ? n - 1 : 0);  // D_i^{-1} sup_i after elimination
    std::vector<BlockVector<B>> y(n);

    Block<B> d = diag[0];
    std::array<std::size_t, B> perm;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            // d = diag_i - sub_{i-1} * upper_{i-1};  r = rhs_i - sub_{i-1} * y_{i-1}
            d = diag[i];
            const Block<B>& l = sub[i - 1];
            const Block<B>& u = upper[i - 1];
            for (std::size_t r = 0; r < B; ++r)
                for (std::size_t c = 0; c < B; ++c) {
                    double s = 0.0;
                    for (std::size_t m = 0; m < B; ++m) s += l[r * B + m] * u[m * B + c];
                    d[r * B + c] -= s;
                }
        }
        BlockVector<B> r = rhs[i];
        if (i > 0) {
            const Block<B>& l = sub[i - 1];
            for (std::size_t a = 0; a < B; ++a) {
                double s = 0.0;
                for (std::size_t m = 0; m < B; ++m) s += l[a * B + m] * y[i - 1][m];
                r[a] -= s;
            }
        }
        if (!detail::lu_factor<B>(d, perm))
            fail(ErrorKind::SingularPivot, "singular diagonal block at row " + std::to_string(i));
        y[i] = detail::lu_solve<B>(d, perm, r);
        if (i + 1 < n) upper[i] = detail::lu_solve_block<B>(d, perm, sup[i]);
    }

    for (std::size_t i = n - 1; i-- > 0;) {
        const Block<B>& u = upper[i];
        for (std::size_t a = 0; a < B; ++a) {
            double s = 0.0;
            for (std::size_t m = 0; m < B; ++m) s += u[a * B + m] * y[i + 1][m];
            y[i][a] -= s;
        }
    }
    return y;
}

}  // namespace segwave
