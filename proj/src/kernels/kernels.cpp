#include "coincast/kernels.hpp"

#include <cstdlib>
#include <string>

#include "coincast/error.hpp"

namespace coincast::kernels {
namespace {

bool cpu_has_avx2() {
#if COINCAST_HAVE_AVX2
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const detail::Ops* ops_for(Backend b) {
    switch (b) {
    case Backend::scalar:
        return &detail::scalar_ops;
    case Backend::avx2:
#if COINCAST_HAVE_AVX2
        return &detail::avx2_ops;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

Backend pick_default() {
    if (const char* env = std::getenv("COINCAST_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2" && cpu_has_avx2()) return Backend::avx2;
        // Unknown or unsupported request falls through to auto-detection.
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

struct Dispatch {
    Backend backend;
    const detail::Ops* ops;
    Dispatch() : backend(pick_default()), ops(ops_for(backend)) {}
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "?";
}

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
    if (b == Backend::avx2) return cpu_has_avx2();
    return true;
}

void force_backend(Backend b) {
    if (!backend_supported(b)) {
        throw Error(std::string("kernel backend not supported on this cpu: ") +
                    backend_name(b));
    }
    dispatch().backend = b;
    dispatch().ops = ops_for(b);
}

double dot(const double* a, const double* b, std::size_t n) {
    return dispatch().ops->dot(a, b, n);
}

double sum(const double* a, std::size_t n) { return dispatch().ops->sum(a, n); }

double sq_diff_sum(const double* a, const double* b, std::size_t n) {
    return dispatch().ops->sq_diff_sum(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch().ops->axpy(alpha, x, y, n);
}

void scale(double alpha, double* y, std::size_t n) {
    dispatch().ops->scale(alpha, y, n);
}

void adam_step(double* w, double* m, double* v, const double* g, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bias1, double bias2) {
    dispatch().ops->adam_step(w, m, v, g, n, lr, beta1, beta2, eps, bias1, bias2);
}

} // namespace coincast::kernels
