// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after the dispatcher has confirmed
// CPU support. Reductions use a single 4-lane accumulator plus scalar tail,
// so results differ from the scalar reference only by reassociation.

#include <immintrin.h>

#include <cmath>

#include "segline/kernels.hpp"

namespace segline::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    }
    double sum = hsum(acc);
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    const __m256d av = _mm256_set1_pd(a);
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
    std::size_t i = 0;
    const __m256d av = _mm256_set1_pd(a);
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

void vmul_avx2(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void vmul_acc_avx2(const double* x, const double* y, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d av = _mm256_loadu_pd(acc + i);
        av = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), av);
        _mm256_storeu_pd(acc + i, av);
    }
    for (; i < n; ++i) acc[i] += x[i] * y[i];
}

void matvec_avx2(const double* w, const double* x, std::size_t rows, std::size_t cols, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(w + r * cols, x, cols);
}

void matvec_acc_avx2(const double* w, const double* x, std::size_t rows, std::size_t cols,
                     double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

void matvec_t_acc_avx2(const double* w, const double* y, std::size_t rows, std::size_t cols,
                       double* x) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        axpy_avx2(yr, w + r * cols, x, cols);
    }
}

void outer_acc_avx2(const double* u, const double* v, std::size_t rows, std::size_t cols,
                    double* w) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(u[r], v, w + r * cols, cols);
}

void adam_update_avx2(double* p, double* m, double* v, const double* g, std::size_t n, double lr,
                      double beta1, double beta2, double eps, double bias1, double bias2) {
    // mul/add (not fmadd) keeps the per-element rounding identical to the
    // scalar reference; this kernel is element-wise so the two backends
    // produce bit-identical parameters.
    std::size_t i = 0;
    const __m256d b1 = _mm256_set1_pd(beta1);
    const __m256d b2 = _mm256_set1_pd(beta2);
    const __m256d ob1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d ob2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d c1 = _mm256_set1_pd(bias1);
    const __m256d c2 = _mm256_set1_pd(bias2);
    for (; i + 4 <= n; i += 4) {
        const __m256d gv = _mm256_loadu_pd(g + i);
        __m256d mv = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        mv = _mm256_add_pd(_mm256_mul_pd(b1, mv), _mm256_mul_pd(ob1, gv));
        vv = _mm256_add_pd(_mm256_mul_pd(b2, vv), _mm256_mul_pd(ob2, _mm256_mul_pd(gv, gv)));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(mv, c1);
        const __m256d vhat = _mm256_div_pd(vv, c2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(lrv, mhat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Ops* avx2_ops_impl() {
    static const Ops table = [] {
        Ops t{};
        t.dot = dot_avx2;
        t.axpy = axpy_avx2;
        t.scale = scale_avx2;
        t.vmul = vmul_avx2;
        t.vmul_acc = vmul_acc_avx2;
        t.matvec = matvec_avx2;
        t.matvec_acc = matvec_acc_avx2;
        t.matvec_t_acc = matvec_t_acc_avx2;
        t.outer_acc = outer_acc_avx2;
        t.adam_update = adam_update_avx2;
        return t;
    }();
    return &table;
}

}  // namespace segline::kernels
