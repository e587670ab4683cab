#pragma once

#include <cstddef>

namespace coincast::kernels {

/// Double-precision inner-loop kernels with runtime-selected backends.
///
/// Every kernel is specified as an exact sequence of IEEE-754 operations:
/// reductions accumulate into four lane accumulators (lane j takes elements
/// with index ≡ j mod 4), a scalar tail, and the fixed combine
/// ((acc0+acc1)+(acc2+acc3))+tail. The scalar reference and the SIMD
/// variants implement that same sequence, so all backends return
/// bit-identical results; equivalence is enforced by tests.

enum class Backend {
    scalar,
    avx2,
};

const char* backend_name(Backend b);

/// Backend used by all kernel calls. Defaults to the widest supported one;
/// the COINCAST_KERNELS environment variable (scalar|avx2) overrides.
Backend active_backend();

bool backend_supported(Backend b);

/// Force a specific backend (throws coincast::Error if unsupported).
void force_backend(Backend b);

/// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

/// sum_i a[i]
double sum(const double* a, std::size_t n);

/// sum_i (a[i]-b[i])^2
double sq_diff_sum(const double* a, const double* b, std::size_t n);

/// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// y[i] *= alpha
void scale(double alpha, double* y, std::size_t n);

/// One Adam update over a flat parameter block:
///   m[i] = beta1*m[i] + (1-beta1)*g[i]
///   v[i] = beta2*v[i] + (1-beta2)*g[i]^2
///   w[i] -= lr * (m[i]/bias1) / (sqrt(v[i]/bias2) + eps)
/// bias1/bias2 are the bias-correction denominators 1-beta^t.
void adam_step(double* w, double* m, double* v, const double* g, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bias1, double bias2);

namespace detail {

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sq_diff_sum)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*adam_step)(double*, double*, double*, const double*, std::size_t,
                      double, double, double, double, double, double);
};

extern const Ops scalar_ops;
#if COINCAST_HAVE_AVX2
extern const Ops avx2_ops;
#endif

} // namespace detail

} // namespace coincast::kernels
