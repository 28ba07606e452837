#include "segline/ops.hpp"

#include <algorithm>
#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"

namespace segline {

namespace {

void require_finite(const Vec& v, const char* what) {
    if (!all_finite(v)) throw NumericError(std::string("non-finite input to ") + what);
}

void require_same_size(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size())
        throw ShapeError(std::string("ShapeMismatch in ") + what + ": " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

}  // namespace

double sigmoid(double x) {
    // Split by sign to avoid overflow in exp.
    if (x >= 0.0) {
        const double z = std::exp(-x);
        return 1.0 / (1.0 + z);
    }
    const double z = std::exp(x);
    return z / (1.0 + z);
}

Vec affine(const Tensor& w, const Vec& x, const Vec& b) {
    if (w.ndim() != 2) throw ShapeError("affine: W must be rank 2, got " + w.shape_str());
    if (w.cols() != x.size() || w.rows() != b.size())
        throw ShapeError("ShapeMismatch in affine: W " + w.shape_str() + ", x(" +
                         std::to_string(x.size()) + "), b(" + std::to_string(b.size()) + ")");
    require_finite(x, "affine");
    Vec y = b;
    kernels::ops().matvec_acc(w.data(), x.data(), w.rows(), w.cols(), y.data());
    return y;
}

void affine_backward(const Tensor& w, const Vec& x, const Vec& gy, Tensor& gw, Vec& gb, Vec& gx) {
    if (gy.size() != w.rows() || gx.size() != x.size() || gb.size() != gy.size() ||
        !gw.same_shape(w))
        throw ShapeError("ShapeMismatch in affine_backward");
    kernels::ops().outer_acc(gy.data(), x.data(), w.rows(), w.cols(), gw.data());
    kernels::ops().axpy(1.0, gy.data(), gb.data(), gb.size());
    kernels::ops().matvec_t_acc(w.data(), gy.data(), w.rows(), w.cols(), gx.data());
}

Vec tanh_vec(const Vec& x) {
    require_finite(x, "tanh");
    Vec y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
    return y;
}

Vec tanh_backward(const Vec& y, const Vec& gy) {
    require_same_size(y, gy, "tanh_backward");
    Vec gx(y.size());
    for (size_t i = 0; i < y.size(); ++i) gx[i] = gy[i] * (1.0 - y[i] * y[i]);
    return gx;
}

Vec sigmoid_vec(const Vec& x) {
    require_finite(x, "sigmoid");
    Vec y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
    return y;
}

Vec sigmoid_backward(const Vec& y, const Vec& gy) {
    require_same_size(y, gy, "sigmoid_backward");
    Vec gx(y.size());
    for (size_t i = 0; i < y.size(); ++i) gx[i] = gy[i] * y[i] * (1.0 - y[i]);
    return gx;
}

Vec softmax_vec(const Vec& x) {
    if (x.empty()) throw ShapeError("softmax of empty vector");
    require_finite(x, "softmax");
    const double mx = *std::max_element(x.begin(), x.end());
    Vec y(x.size());
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        y[i] = std::exp(x[i] - mx);
        sum += y[i];
    }
    for (double& v : y) v /= sum;
    return y;
}

Vec softmax_backward(const Vec& y, const Vec& gy) {
    require_same_size(y, gy, "softmax_backward");
    const double inner = kernels::ops().dot(y.data(), gy.data(), y.size());
    Vec gx(y.size());
    for (size_t i = 0; i < y.size(); ++i) gx[i] = y[i] * (gy[i] - inner);
    return gx;
}

Vec concat(const Vec& a, const Vec& b) {
    Vec y;
    y.reserve(a.size() + b.size());
    y.insert(y.end(), a.begin(), a.end());
    y.insert(y.end(), b.begin(), b.end());
    return y;
}

void concat_backward(const Vec& gy, size_t na, Vec& ga, Vec& gb) {
    if (na > gy.size()) throw ShapeError("ShapeMismatch in concat_backward");
    ga.assign(gy.begin(), gy.begin() + static_cast<ptrdiff_t>(na));
    gb.assign(gy.begin() + static_cast<ptrdiff_t>(na), gy.end());
}

Vec emul(const Vec& a, const Vec& b) {
    require_same_size(a, b, "emul");
    Vec y(a.size());
    kernels::ops().vmul(a.data(), b.data(), y.data(), a.size());
    return y;
}

void emul_backward(const Vec& a, const Vec& b, const Vec& gy, Vec& ga, Vec& gb) {
    require_same_size(a, b, "emul_backward");
    require_same_size(a, gy, "emul_backward");
    if (ga.size() != a.size() || gb.size() != b.size())
        throw ShapeError("ShapeMismatch in emul_backward");
    kernels::ops().vmul_acc(gy.data(), b.data(), ga.data(), a.size());
    kernels::ops().vmul_acc(gy.data(), a.data(), gb.data(), b.size());
}

double cosine(const Vec& a, const Vec& b) {
    require_same_size(a, b, "cosine");
    require_finite(a, "cosine");
    require_finite(b, "cosine");
    const double na = std::sqrt(kernels::ops().dot(a.data(), a.data(), a.size()));
    const double nb = std::sqrt(kernels::ops().dot(b.data(), b.data(), b.size()));
    if (na == 0.0 || nb == 0.0) throw NumericError("ZeroNormVector in cosine");
    return kernels::ops().dot(a.data(), b.data(), a.size()) / (na * nb);
}

void cosine_backward(const Vec& a, const Vec& b, double g, Vec& ga, Vec& gb) {
    require_same_size(a, b, "cosine_backward");
    const double na2 = kernels::ops().dot(a.data(), a.data(), a.size());
    const double nb2 = kernels::ops().dot(b.data(), b.data(), b.size());
    const double na = std::sqrt(na2);
    const double nb = std::sqrt(nb2);
    if (na == 0.0 || nb == 0.0) throw NumericError("ZeroNormVector in cosine_backward");
    const double ab = kernels::ops().dot(a.data(), b.data(), a.size());
    const double inv = 1.0 / (na * nb);
    const double cosv = ab * inv;
    // d cos / da = b/(|a||b|) - cos * a/|a|^2
    kernels::ops().axpy(g * inv, b.data(), ga.data(), a.size());
    kernels::ops().axpy(-g * cosv / na2, a.data(), ga.data(), a.size());
    kernels::ops().axpy(g * inv, a.data(), gb.data(), b.size());
    kernels::ops().axpy(-g * cosv / nb2, b.data(), gb.data(), b.size());
}

}  // namespace segline
