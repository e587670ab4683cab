#include "coincast/kernels.hpp"

#include <cmath>

// Reference backend. The four-accumulator layout mirrors one SIMD register,
// which is what makes the vector backends bit-identical to this one.

namespace coincast::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        acc0 += a[i] * b[i];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (std::size_t i = nb; i < n; ++i) tail += a[i] * b[i];
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        acc0 += a[i];
        acc1 += a[i + 1];
        acc2 += a[i + 2];
        acc3 += a[i + 3];
    }
    double tail = 0.0;
    for (std::size_t i = nb; i < n; ++i) tail += a[i];
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

double sq_diff_sum_scalar(const double* a, const double* b, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        const double d0 = a[i] - b[i];
        const double d1 = a[i + 1] - b[i + 1];
        const double d2 = a[i + 2] - b[i + 2];
        const double d3 = a[i + 3] - b[i + 3];
        acc0 += d0 * d0;
        acc1 += d1 * d1;
        acc2 += d2 * d2;
        acc3 += d3 * d3;
    }
    double tail = 0.0;
    for (std::size_t i = nb; i < n; ++i) {
        const double d = a[i] - b[i];
        tail += d * d;
    }
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale_scalar(double alpha, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = alpha * y[i];
}

void adam_step_scalar(double* w, double* m, double* v, const double* g,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bias1, double bias2) {
    const double om1 = 1.0 - beta1;
    const double om2 = 1.0 - beta2;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + om1 * g[i];
        v[i] = beta2 * v[i] + om2 * (g[i] * g[i]);
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        w[i] = w[i] - (lr * mhat) / (std::sqrt(vhat) + eps);
    }
}

} // namespace

namespace detail {

const Ops scalar_ops = {
    dot_scalar, sum_scalar, sq_diff_sum_scalar,
    axpy_scalar, scale_scalar, adam_step_scalar,
};

} // namespace detail
} // namespace coincast::kernels
