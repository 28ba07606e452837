#pragma once

#include <cstddef>

namespace segline::kernels {

// Dense float64 kernels behind every inner loop: LSTM gate matvecs,
// outer-product weight gradients, attention dots, Adam updates. Each kernel
// has a scalar reference implementation and, on x86-64 with AVX2+FMA, a SIMD
// variant. The backend is resolved once at startup from CPU features;
// SEGLINE_KERNELS=scalar|avx2 overrides the automatic pick.
//
// Transcendental functions (tanh, exp) are deliberately not vectorized so
// activation math is bit-identical across backends; only reduction kernels
// differ, by floating-point reassociation, and the test suite bounds that
// difference.
struct Ops {
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x *= a
    void (*scale)(double a, double* x, std::size_t n);
    // out = x .* y
    void (*vmul)(const double* x, const double* y, double* out, std::size_t n);
    // acc += x .* y
    void (*vmul_acc)(const double* x, const double* y, double* acc, std::size_t n);
    // y = W x            (W row-major, rows x cols)
    void (*matvec)(const double* w, const double* x, std::size_t rows, std::size_t cols, double* y);
    // y += W x
    void (*matvec_acc)(const double* w, const double* x, std::size_t rows, std::size_t cols,
                       double* y);
    // x += W^T y
    void (*matvec_t_acc)(const double* w, const double* y, std::size_t rows, std::size_t cols,
                         double* x);
    // W += u v^T
    void (*outer_acc)(const double* u, const double* v, std::size_t rows, std::size_t cols,
                      double* w);
    // Adam with bias correction: bias1 = 1 - beta1^t, bias2 = 1 - beta2^t.
    void (*adam_update)(double* p, double* m, double* v, const double* g, std::size_t n, double lr,
                        double beta1, double beta2, double eps, double bias1, double bias2);
};

enum class Backend { scalar, avx2 };

const Ops& ops();         // active backend, resolved once
const Ops& scalar_ops();  // always available
const Ops* avx2_ops();    // nullptr when the build or CPU lacks AVX2+FMA

Backend active_backend();
const char* backend_name();

// Test hook; throws segline::Error when the backend is unavailable.
void force_backend(Backend b);

}  // namespace segline::kernels
