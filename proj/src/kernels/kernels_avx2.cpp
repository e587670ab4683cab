#include "coincast/kernels.hpp"

#if COINCAST_HAVE_AVX2

#include <immintrin.h>

// AVX2 backend. No FMA and no lane reshuffling: each intrinsic maps to the
// exact operation sequence the scalar reference performs, lane j holding
// elements with index ≡ j mod 4.

namespace coincast::kernels {
namespace {

inline double combine(__m256d acc, double tail) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + tail;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double tail = 0.0;
    for (std::size_t i = nb; i < n; ++i) tail += a[i] * b[i];
    return combine(acc, tail);
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    }
    double tail = 0.0;
    for (std::size_t i = nb; i < n; ++i) tail += a[i];
    return combine(acc, tail);
}

double sq_diff_sum_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double tail = 0.0;
    for (std::size_t i = nb; i < n; ++i) {
        const double d = a[i] - b[i];
        tail += d * d;
    }
    return combine(acc, tail);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (std::size_t i = nb; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale_avx2(double alpha, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
    }
    for (std::size_t i = nb; i < n; ++i) y[i] = alpha * y[i];
}

void adam_step_avx2(double* w, double* m, double* v, const double* g,
                    std::size_t n, double lr, double beta1, double beta2,
                    double eps, double bias1, double bias2) {
    const double om1s = 1.0 - beta1;
    const double om2s = 1.0 - beta2;
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vom1 = _mm256_set1_pd(om1s);
    const __m256d vom2 = _mm256_set1_pd(om2s);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vbias1 = _mm256_set1_pd(bias1);
    const __m256d vbias2 = _mm256_set1_pd(bias2);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        const __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vm = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vom1, vg));
        vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv),
                           _mm256_mul_pd(vom2, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(vm, vbias1);
        const __m256d vhat = _mm256_div_pd(vv, vbias2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
        _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(w + i), step));
    }
    if (nb < n) {
        detail::scalar_ops.adam_step(w + nb, m + nb, v + nb, g + nb, n - nb,
                                     lr, beta1, beta2, eps, bias1, bias2);
    }
}

} // namespace

namespace detail {

const Ops avx2_ops = {
    dot_avx2, sum_avx2, sq_diff_sum_avx2,
    axpy_avx2, scale_avx2, adam_step_avx2,
};

} // namespace detail
} // namespace coincast::kernels

#endif // COINCAST_HAVE_AVX2
