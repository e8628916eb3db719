#include "segwave/simd/kernels.hpp"

namespace segwave::simd::scalar {

void wave_residual(const double* u, const double* v, std::size_t n_nodes, StencilView st,
                   WaveCoefficients cf, double* res_u, double* res_v) {
    const double ak = cf.alpha * cf.k;
    for (std::size_t j = 0; j + 2 < n_nodes; ++j) {
        const std::size_t i = j + 1;
        const double du1 = u[i + 1] - u[i - 1];
        const double du2 = (u[i + 1] - u[i]) - (u[i] - u[i - 1]);
        const double dv1 = v[i + 1] - v[i - 1];
        const double dv2 = (v[i + 1] - v[i]) - (v[i] - v[i - 1]);
        const double uu = u[i];
        const double vv = v[i];
        const double uxx = st.p[j] * du2 - st.w[j] * du1;
        const double vxx = st.p[j] * dv2 - st.w[j] * dv1;
        const double ux = st.q[j] * du1;
        const double vx = st.q[j] * dv1;
        const double uv = uu * vv;
        res_u[j] = uxx + cf.c * ux + uu * (1.0 - uu) - cf.k * uv;
        res_v[j] = cf.d * vxx + cf.c * vx + cf.r * (vv * (1.0 - vv)) - ak * uv;
    }
}

void reaction(double* u, double* v, std::size_t n, double dt, int substeps, double k, double alpha,
              double r) {
    const double h = dt / substeps;
    const double ak = alpha * k;
    for (std::size_t i = 0; i < n; ++i) {
        double uu = u[i];
        double vv = v[i];
        for (int s = 0; s < substeps; ++s) {
            const double uv = uu * vv;
            const double fu = uu * (1.0 - uu) - k * uv;
            const double fv = r * (vv * (1.0 - vv)) - ak * uv;
            uu = uu + h * fu;
            vv = vv + h * fv;
        }
        u[i] = uu;
        v[i] = vv;
    }
}

double max_product(const double* u, const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    double m = u[0] * v[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double p = u[i] * v[i];
        m = p > m ? p : m;
    }
    return m;
}

}  // namespace segwave::simd::scalar
