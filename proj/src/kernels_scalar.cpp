#include <cmath>

#include "segline/kernels.hpp"

// Reference kernels. Plain sequential loops; the equivalence tests treat
// these as ground truth for the SIMD variants.

namespace segline::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void vmul_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void vmul_acc_scalar(const double* x, const double* y, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * y[i];
}

void matvec_scalar(const double* w, const double* x, std::size_t rows, std::size_t cols,
                   double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(w + r * cols, x, cols);
}

void matvec_acc_scalar(const double* w, const double* x, std::size_t rows, std::size_t cols,
                       double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void matvec_t_acc_scalar(const double* w, const double* y, std::size_t rows, std::size_t cols,
                         double* x) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        const double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) x[c] += wr[c] * yr;
    }
}

void outer_acc_scalar(const double* u, const double* v, std::size_t rows, std::size_t cols,
                      double* w) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double ur = u[r];
        double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) wr[c] += ur * v[c];
    }
}

void adam_update_scalar(double* p, double* m, double* v, const double* g, std::size_t n, double lr,
                        double beta1, double beta2, double eps, double bias1, double bias2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
        const double mhat = m[i] / bias1;
        const double vhat = v[i] / bias2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops table = [] {
        Ops t{};
        t.dot = dot_scalar;
        t.axpy = axpy_scalar;
        t.scale = scale_scalar;
        t.vmul = vmul_scalar;
        t.vmul_acc = vmul_acc_scalar;
        t.matvec = matvec_scalar;
        t.matvec_acc = matvec_acc_scalar;
        t.matvec_t_acc = matvec_t_acc_scalar;
        t.outer_acc = outer_acc_scalar;
        t.adam_update = adam_update_scalar;
        return t;
    }();
    return table;
}

}  // namespace segline::kernels
