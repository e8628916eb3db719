// Compiled with -mavx2 (and without FMA) when the compiler supports it.

#include "segwave/simd/kernels.hpp"

#if defined(SEGWAVE_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace segwave::simd::avx2 {

#if defined(SEGWAVE_HAVE_AVX2)

void wave_residual(const double* u, const double* v, std::size_t n_nodes, StencilView st,
                   WaveCoefficients cf, double* res_u, double* res_v) {
    const std::size_t n_inner = n_nodes >= 2 ? n_nodes - 2 : 0;
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d c = _mm256_set1_pd(cf.c);
    const __m256d k = _mm256_set1_pd(cf.k);
    const __m256d ak = _mm256_set1_pd(cf.alpha * cf.k);
    const __m256d r = _mm256_set1_pd(cf.r);
    const __m256d d = _mm256_set1_pd(cf.d);

    std::size_t j = 0;
    for (; j + 4 <= n_inner; j += 4) {
        const __m256d um = _mm256_loadu_pd(u + j);
        const __m256d uc = _mm256_loadu_pd(u + j + 1);
        const __m256d up = _mm256_loadu_pd(u + j + 2);
        const __m256d vm = _mm256_loadu_pd(v + j);
        const __m256d vc = _mm256_loadu_pd(v + j + 1);
        const __m256d vp = _mm256_loadu_pd(v + j + 2);
        const __m256d p = _mm256_loadu_pd(st.p + j);
        const __m256d q = _mm256_loadu_pd(st.q + j);
        const __m256d w = _mm256_loadu_pd(st.w + j);

        const __m256d du1 = _mm256_sub_pd(up, um);
        const __m256d du2 = _mm256_sub_pd(_mm256_sub_pd(up, uc), _mm256_sub_pd(uc, um));
        const __m256d dv1 = _mm256_sub_pd(vp, vm);
        const __m256d dv2 = _mm256_sub_pd(_mm256_sub_pd(vp, vc), _mm256_sub_pd(vc, vm));
        const __m256d uxx = _mm256_sub_pd(_mm256_mul_pd(p, du2), _mm256_mul_pd(w, du1));
        const __m256d vxx = _mm256_sub_pd(_mm256_mul_pd(p, dv2), _mm256_mul_pd(w, dv1));
        const __m256d ux = _mm256_mul_pd(q, du1);
        const __m256d vx = _mm256_mul_pd(q, dv1);
        const __m256d uv = _mm256_mul_pd(uc, vc);

        __m256d fu = _mm256_add_pd(uxx, _mm256_mul_pd(c, ux));
        fu = _mm256_add_pd(fu, _mm256_mul_pd(uc, _mm256_sub_pd(one, uc)));
        fu = _mm256_sub_pd(fu, _mm256_mul_pd(k, uv));
        __m256d fv = _mm256_add_pd(_mm256_mul_pd(d, vxx), _mm256_mul_pd(c, vx));
        fv = _mm256_add_pd(fv, _mm256_mul_pd(r, _mm256_mul_pd(vc, _mm256_sub_pd(one, vc))));
        fv = _mm256_sub_pd(fv, _mm256_mul_pd(ak, uv));
        _mm256_storeu_pd(res_u + j, fu);
        _mm256_storeu_pd(res_v + j, fv);
    }
    if (j < n_inner) {
        const StencilView tail{st.p + j, st.q + j, st.w + j};
        scalar::wave_residual(u + j, v + j, n_nodes - j, tail, cf, res_u + j, res_v + j);
    }
}

void reaction(double* u, double* v, std::size_t n, double dt, int substeps, double k, double alpha,
              double r) {
    const double h = dt / substeps;
    const __m256d hv = _mm256_set1_pd(h);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d kv = _mm256_set1_pd(k);
    const __m256d akv = _mm256_set1_pd(alpha * k);
    const __m256d rv = _mm256_set1_pd(r);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d uu = _mm256_loadu_pd(u + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        for (int s = 0; s < substeps; ++s) {
            const __m256d uv = _mm256_mul_pd(uu, vv);
            const __m256d fu = _mm256_sub_pd(_mm256_mul_pd(uu, _mm256_sub_pd(one, uu)),
                                             _mm256_mul_pd(kv, uv));
            const __m256d fv =
                _mm256_sub_pd(_mm256_mul_pd(rv, _mm256_mul_pd(vv, _mm256_sub_pd(one, vv))),
                              _mm256_mul_pd(akv, uv));
            uu = _mm256_add_pd(uu, _mm256_mul_pd(hv, fu));
            vv = _mm256_add_pd(vv, _mm256_mul_pd(hv, fv));
        }
        _mm256_storeu_pd(u + i, uu);
        _mm256_storeu_pd(v + i, vv);
    }
    if (i < n) scalar::reaction(u + i, v + i, n - i, dt, substeps, k, alpha, r);
}

double max_product(const double* u, const double* v, std::size_t n) {
    if (n < 8) return scalar::max_product(u, v, n);
    __m256d m = _mm256_mul_pd(_mm256_loadu_pd(u), _mm256_loadu_pd(v));
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4)
        m = _mm256_max_pd(m, _mm256_mul_pd(_mm256_loadu_pd(u + i), _mm256_loadu_pd(v + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double best = lanes[0];
    for (int l = 1; l < 4; ++l) best = lanes[l] > best ? lanes[l] : best;
    for (; i < n; ++i) {
        const double p = u[i] * v[i];
        best = p > best ? p : best;
    }
    return best;
}

#else

void wave_residual(const double* u, const double* v, std::size_t n_nodes, StencilView st,
                   WaveCoefficients cf, double* res_u, double* res_v) {
    scalar::wave_residual(u, v, n_nodes, st, cf, res_u, res_v);
}
void reaction(double* u, double* v, std::size_t n, double dt, int substeps, double k, double alpha,
              double r) {
    scalar::reaction(u, v, n, dt, substeps, k, alpha, r);
}
double max_product(const double* u, const double* v, std::size_t n) {
    return scalar::max_product(u, v, n);
}

#endif

}  // namespace segwave::simd::avx2
