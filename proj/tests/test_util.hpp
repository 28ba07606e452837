#pragma once

#include <functional>
#include <vector>

#include "segline/rng.hpp"
#include "segline/tensor.hpp"

namespace segline::testutil {

inline Vec random_vec(Rng& rng, size_t n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline void randomize(Rng& rng, Tensor& t, double lo = -1.0, double hi = 1.0) {
    for (size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
}

// Central difference d f / d x[i] for a scalar function of a mutable buffer.
inline double fd_at(const std::function<double()>& f, double* slot, double eps = 1e-5) {
    const double saved = *slot;
    *slot = saved + eps;
    const double fp = f();
    *slot = saved - eps;
    const double fm = f();
    *slot = saved;
    return (fp - fm) / (2.0 * eps);
}

inline double rel_err(double a, double b, double floor = 1e-3) {
    const double denom = std::max({std::abs(a), std::abs(b), floor});
    return std::abs(a - b) / denom;
}

}  // namespace segline::testutil
