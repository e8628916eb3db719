#pragma once

// Data-parallel inner loops shared by the wave solver and the front
// simulator. Each kernel has a scalar reference and an AVX2 variant; the
// variant is picked once at runtime from CPUID. Both variants perform the
// same floating-point operations in the same order (no FMA contraction), so
// they agree bit for bit.

#include <cstddef>
#include <string_view>

namespace segwave::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Per-node coefficients of the mapped centered-difference operator on a
/// (possibly graded) mesh xi = g(s), s uniform with step ds:
///   f'  ~ q (f[i+1] - f[i-1])
///   f'' ~ p (f[i+1] - 2 f[i] + f[i-1]) - w (f[i+1] - f[i-1])
/// with p = 1/(g' ds)^2, q = 1/(2 g' ds), w = g'' q / g'^2.
struct StencilView {
    const double* p;
    const double* q;
    const double* w;
};

struct WaveCoefficients {
    double c;
    double k;
    double alpha;
    double r;
    double d;
};

/// Residuals of
///   u'' + c u' + u(1-u) - k u v
///   d v'' + c v' + r v(1-v) - alpha k u v
/// at interior nodes 1..n_nodes-2. `u`, `v` hold all n_nodes values; outputs
/// and stencil arrays are indexed by interior node (offset by one).
using WaveResidualFn = void (*)(const double* u, const double* v, std::size_t n_nodes,
                                StencilView stencil, WaveCoefficients coeffs, double* res_u,
                                double* res_v);

/// `substeps` forward-Euler steps of length dt/substeps of the competition
/// kinetics (u(1-u) - k u v, r v(1-v) - alpha k u v) applied node-wise.
using ReactionFn = void (*)(double* u, double* v, std::size_t n, double dt, int substeps, double k,
                            double alpha, double r);

/// max_i u[i] * v[i] (0 for n == 0).
using MaxProductFn = double (*)(const double* u, const double* v, std::size_t n);

struct KernelTable {
    Isa isa;
    WaveResidualFn wave_residual;
    ReactionFn reaction;
    MaxProductFn max_product;
};

namespace scalar {
void wave_residual(const double* u, const double* v, std::size_t n_nodes, StencilView stencil,
                   WaveCoefficients coeffs, double* res_u, double* res_v);
void reaction(double* u, double* v, std::size_t n, double dt, int substeps, double k, double alpha,
              double r);
double max_product(const double* u, const double* v, std::size_t n);
}  // namespace scalar

namespace avx2 {
void wave_residual(const double* u, const double* v, std::size_t n_nodes, StencilView stencil,
                   WaveCoefficients coeffs, double* res_u, double* res_v);
void reaction(double* u, double* v, std::size_t n, double dt, int substeps, double k, double alpha,
              double r);
double max_product(const double* u, const double* v, std::size_t n);
}  // namespace avx2

/// True if this binary was built with the variant and the CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Kernel table for a specific ISA; falls back to scalar if unavailable.
const KernelTable& kernels_for(Isa isa) noexcept;

/// Active kernel table: the best available ISA, unless the environment
/// variable SEGWAVE_ISA=scalar forces the reference kernels.
const KernelTable& kernels() noexcept;

}  // namespace segwave::simd
