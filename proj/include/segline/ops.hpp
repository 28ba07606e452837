#pragma once

#include <vector>

#include "segline/tensor.hpp"

namespace segline {

// Differentiable primitive suite. Forward functions validate shapes and
// reject non-finite inputs; backward functions accumulate into their
// gradient arguments (callers zero-initialize). Every backward here is
// covered by a central-difference check in the test suite.

double sigmoid(double x);

// y = W x + b
Vec affine(const Tensor& w, const Vec& x, const Vec& b);
// accumulates gW += gy x^T, gb += gy, gx += W^T gy
void affine_backward(const Tensor& w, const Vec& x, const Vec& gy, Tensor& gw, Vec& gb, Vec& gx);

Vec tanh_vec(const Vec& x);
// gx from the forward output y: gy .* (1 - y^2)
Vec tanh_backward(const Vec& y, const Vec& gy);

Vec sigmoid_vec(const Vec& x);
Vec sigmoid_backward(const Vec& y, const Vec& gy);

// Max-shifted, so constant inputs give exactly uniform output.
Vec softmax_vec(const Vec& x);
Vec softmax_backward(const Vec& y, const Vec& gy);

Vec concat(const Vec& a, const Vec& b);
// splits gy back into (ga, gb) with |a| = na
void concat_backward(const Vec& gy, size_t na, Vec& ga, Vec& gb);

Vec emul(const Vec& a, const Vec& b);
void emul_backward(const Vec& a, const Vec& b, const Vec& gy, Vec& ga, Vec& gb);

// Throws NumericError("ZeroNormVector ...") when either norm is zero.
double cosine(const Vec& a, const Vec& b);
void cosine_backward(const Vec& a, const Vec& b, double g, Vec& ga, Vec& gb);

}  // namespace segline
