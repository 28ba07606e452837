#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "segline/kernels.hpp"
#include "segline/rng.hpp"

#include "test_util.hpp"

using namespace segline;
using namespace segline::testutil;
namespace k = segline::kernels;

namespace {

// sizes that exercise full SIMD lanes plus every tail length
const std::vector<size_t> kSizes = {1, 2, 3, 4, 5, 7, 8, 13, 16, 31, 64, 100, 1000};

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("scalar dot matches naive loop") {
    Rng rng(1);
    for (size_t n : kSizes) {
        const Vec x = random_vec(rng, n), y = random_vec(rng, n);
        double expect = 0.0;
        for (size_t i = 0; i < n; ++i) expect += x[i] * y[i];
        CHECK(k::scalar_ops().dot(x.data(), y.data(), n) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("scalar matvec matches naive loops") {
    Rng rng(2);
    const size_t rows = 7, cols = 13;
    const Vec w = random_vec(rng, rows * cols), x = random_vec(rng, cols);
    Vec y(rows, 0.0);
    k::scalar_ops().matvec(w.data(), x.data(), rows, cols, y.data());
    for (size_t r = 0; r < rows; ++r) {
        double expect = 0.0;
        for (size_t c = 0; c < cols; ++c) expect += w[r * cols + c] * x[c];
        CHECK(y[r] == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const k::Ops* simd = k::avx2_ops();
    if (simd == nullptr) {
        MESSAGE("AVX2 unavailable on this machine; equivalence suite skipped");
        return;
    }
    const k::Ops& ref = k::scalar_ops();
    Rng rng(3);

    for (size_t n : kSizes) {
        CAPTURE(n);
        const Vec x = random_vec(rng, n), y = random_vec(rng, n);

        CHECK(close(simd->dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n), 1e-12));

        Vec a1 = y, a2 = y;
        ref.axpy(0.37, x.data(), a1.data(), n);
        simd->axpy(0.37, x.data(), a2.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(close(a1[i], a2[i], 1e-13));

        Vec s1 = x, s2 = x;
        ref.scale(-1.25, s1.data(), n);
        simd->scale(-1.25, s2.data(), n);
        CHECK(s1 == s2);  // single multiply per element: bitwise equal

        Vec m1(n), m2(n);
        ref.vmul(x.data(), y.data(), m1.data(), n);
        simd->vmul(x.data(), y.data(), m2.data(), n);
        CHECK(m1 == m2);

        Vec acc1 = y, acc2 = y;
        ref.vmul_acc(x.data(), x.data(), acc1.data(), n);
        simd->vmul_acc(x.data(), x.data(), acc2.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(close(acc1[i], acc2[i], 1e-13));
    }
}

TEST_CASE("avx2 matvec family matches the scalar reference") {
    const k::Ops* simd = k::avx2_ops();
    if (simd == nullptr) return;
    const k::Ops& ref = k::scalar_ops();
    Rng rng(4);
    for (size_t rows : {size_t(1), size_t(3), size_t(8), size_t(17)}) {
        for (size_t cols : {size_t(1), size_t(4), size_t(9), size_t(33), size_t(256)}) {
            CAPTURE(rows);
            CAPTURE(cols);
            const Vec w = random_vec(rng, rows * cols);
            const Vec x = random_vec(rng, cols);
            const Vec yv = random_vec(rng, rows);

            Vec y1(rows), y2(rows);
            ref.matvec(w.data(), x.data(), rows, cols, y1.data());
            simd->matvec(w.data(), x.data(), rows, cols, y2.data());
            for (size_t r = 0; r < rows; ++r) CHECK(close(y1[r], y2[r], 1e-12));

            Vec ya1 = yv, ya2 = yv;
            ref.matvec_acc(w.data(), x.data(), rows, cols, ya1.data());
            simd->matvec_acc(w.data(), x.data(), rows, cols, ya2.data());
            for (size_t r = 0; r < rows; ++r) CHECK(close(ya1[r], ya2[r], 1e-12));

            Vec xt1(cols, 0.1), xt2(cols, 0.1);
            ref.matvec_t_acc(w.data(), yv.data(), rows, cols, xt1.data());
            simd->matvec_t_acc(w.data(), yv.data(), rows, cols, xt2.data());
            for (size_t c = 0; c < cols; ++c) CHECK(close(xt1[c], xt2[c], 1e-12));

            Vec w1 = w, w2 = w;
            ref.outer_acc(yv.data(), x.data(), rows, cols, w1.data());
            simd->outer_acc(yv.data(), x.data(), rows, cols, w2.data());
            for (size_t i = 0; i < rows * cols; ++i) CHECK(close(w1[i], w2[i], 1e-13));
        }
    }
}

TEST_CASE("adam kernel is bitwise identical across backends") {
    const k::Ops* simd = k::avx2_ops();
    if (simd == nullptr) return;
    Rng rng(5);
    for (size_t n : kSizes) {
        Vec p1 = random_vec(rng, n), m1 = random_vec(rng, n, 0.0, 0.1),
            v1 = random_vec(rng, n, 0.0, 0.1);
        const Vec g = random_vec(rng, n);
        Vec p2 = p1, m2 = m1, v2 = v1;
        k::scalar_ops().adam_update(p1.data(), m1.data(), v1.data(), g.data(), n, 1e-3, 0.9,
                                    0.999, 1e-8, 0.1, 0.001);
        simd->adam_update(p2.data(), m2.data(), v2.data(), g.data(), n, 1e-3, 0.9, 0.999, 1e-8,
                          0.1, 0.001);
        CHECK(p1 == p2);
        CHECK(m1 == m2);
        CHECK(v1 == v2);
    }
}

TEST_CASE("force_backend switches the active table") {
    const k::Backend original = k::active_backend();
    k::force_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(std::string(k::backend_name()) == "scalar");
    if (k::avx2_ops() != nullptr) {
        k::force_backend(k::Backend::avx2);
        CHECK(std::string(k::backend_name()) == "avx2");
    }
    k::force_backend(original);
}
