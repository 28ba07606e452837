#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "segline/checkpoint.hpp"
#include "segline/error.hpp"
#include "segline/gradcheck.hpp"
#include "segline/kernels.hpp"
#include "segline/lstm.hpp"
#include "segline/ops.hpp"
#include "segline/params.hpp"
#include "segline/rng.hpp"

#include "test_util.hpp"

using namespace segline;
using namespace segline::testutil;

TEST_CASE("sigmoid at zero is one half") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(30.0) > 0.999999);
    CHECK(sigmoid(-30.0) < 1e-6);
    CHECK(sigmoid(-800.0) >= 0.0);  // no overflow
}

TEST_CASE("softmax of constant vector is uniform") {
    for (double c : {-5.0, 0.0, 3.25}) {
        const Vec y = softmax_vec({c, c, c});
        for (double v : y) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        double sum = 0.0;
        for (double v : y) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("softmax output is a distribution on random input") {
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        const Vec x = random_vec(rng, 1 + static_cast<size_t>(rng.below(9)), -20.0, 20.0);
        const Vec y = softmax_vec(x);
        double sum = 0.0;
        for (double v : y) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("cosine identities") {
    Rng rng(12);
    const Vec x = random_vec(rng, 6);
    CHECK(cosine(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    Vec neg(x.size());
    for (size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    CHECK(cosine(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(cosine({0.0, 0.0}, {1.0, 1.0}), NumericError);
    CHECK_THROWS_WITH_AS(cosine({1.0}, {1.0, 2.0}), doctest::Contains("ShapeMismatch"),
                         ShapeError);
}

namespace {

// Scalar probe loss: fixed random weights dotted with the op output, so
// central differences apply to a scalar function of the inputs.
double probe(const Vec& weights, const Vec& out) {
    REQUIRE(weights.size() == out.size());
    return kernels::ops().dot(weights.data(), out.data(), out.size());
}

}  // namespace

TEST_CASE("primitive backward passes match central differences") {
    Rng rng(13);
    const size_t n = 5, m = 4;
    Tensor w = Tensor::matrix(m, n);
    randomize(rng, w);
    Vec x = random_vec(rng, n);
    Vec b = random_vec(rng, m);
    const Vec probe_w = random_vec(rng, m);

    SUBCASE("affine") {
        auto f = [&] { return probe(probe_w, affine(w, x, b)); };
        Tensor gw = Tensor::matrix(m, n);
        Vec gb(m, 0.0), gx(n, 0.0);
        affine_backward(w, x, probe_w, gw, gb, gx);
        for (size_t i = 0; i < w.size(); ++i)
            CHECK(rel_err(gw[i], fd_at(f, &w[i]), 1e-6) < 1e-6);
        for (size_t i = 0; i < n; ++i) CHECK(rel_err(gx[i], fd_at(f, &x[i]), 1e-6) < 1e-6);
        for (size_t i = 0; i < m; ++i) CHECK(rel_err(gb[i], fd_at(f, &b[i]), 1e-6) < 1e-6);
    }

    SUBCASE("tanh / sigmoid / softmax / emul / cosine") {
        Vec v = random_vec(rng, n);
        Vec u = random_vec(rng, n);
        const Vec pw = random_vec(rng, n);

        auto f_tanh = [&] { return probe(pw, tanh_vec(v)); };
        const Vec g_tanh = tanh_backward(tanh_vec(v), pw);
        for (size_t i = 0; i < n; ++i)
            CHECK(rel_err(g_tanh[i], fd_at(f_tanh, &v[i]), 1e-6) < 1e-6);

        auto f_sig = [&] { return probe(pw, sigmoid_vec(v)); };
        const Vec g_sig = sigmoid_backward(sigmoid_vec(v), pw);
        for (size_t i = 0; i < n; ++i) CHECK(rel_err(g_sig[i], fd_at(f_sig, &v[i]), 1e-6) < 1e-6);

        auto f_soft = [&] { return probe(pw, softmax_vec(v)); };
        const Vec g_soft = softmax_backward(softmax_vec(v), pw);
        for (size_t i = 0; i < n; ++i)
            CHECK(rel_err(g_soft[i], fd_at(f_soft, &v[i]), 1e-6) < 1e-6);

        auto f_emul = [&] { return probe(pw, emul(v, u)); };
        Vec g_ev(n, 0.0), g_eu(n, 0.0);
        emul_backward(v, u, pw, g_ev, g_eu);
        for (size_t i = 0; i < n; ++i) {
            CHECK(rel_err(g_ev[i], fd_at(f_emul, &v[i]), 1e-6) < 1e-6);
            CHECK(rel_err(g_eu[i], fd_at(f_emul, &u[i]), 1e-6) < 1e-6);
        }

        auto f_cos = [&] { return cosine(v, u); };
        Vec g_cv(n, 0.0), g_cu(n, 0.0);
        cosine_backward(v, u, 1.0, g_cv, g_cu);
        for (size_t i = 0; i < n; ++i) {
            CHECK(rel_err(g_cv[i], fd_at(f_cos, &v[i]), 1e-6) < 1e-6);
            CHECK(rel_err(g_cu[i], fd_at(f_cos, &u[i]), 1e-6) < 1e-6);
        }
    }
}

namespace {

struct CellFixture {
    size_t input = 4, hidden = 3;
    Tensor wx{std::vector<size_t>{12, 4}};
    Tensor wh{std::vector<size_t>{12, 3}};
    Tensor b{std::vector<size_t>{12}};
    LstmParams params() const { return {&wx, &wh, &b}; }
};

}  // namespace

TEST_CASE("lstm cell zero parameters give zero output") {
    CellFixture fx;
    Rng rng(14);
    const Vec x = random_vec(rng, fx.input);
    Vec h, c;
    lstm_cell(fx.params(), x, {}, {}, h, c);
    for (double v : h) CHECK(v == 0.0);  // tanh(0)*sigmoid(0) = 0
    for (double v : c) CHECK(v == 0.0);
}

TEST_CASE("lstm cell saturated gates carry the cell state") {
    CellFixture fx;
    // forget bias +20, input bias -20, all weights zero
    for (size_t j = 0; j < fx.hidden; ++j) {
        fx.b[j] = -20.0;              // input gate
        fx.b[fx.hidden + j] = 20.0;   // forget gate
    }
    Rng rng(15);
    const Vec x = random_vec(rng, fx.input);
    const Vec h_prev = random_vec(rng, fx.hidden, -0.9, 0.9);
    const Vec c_prev = random_vec(rng, fx.hidden, -0.9, 0.9);
    Vec h, c;
    lstm_cell(fx.params(), x, h_prev, c_prev, h, c);
    for (size_t j = 0; j < fx.hidden; ++j) CHECK(std::abs(c[j] - c_prev[j]) < 1e-8);
}

TEST_CASE("lstm cell is deterministic") {
    CellFixture fx;
    Rng rng(16);
    randomize(rng, fx.wx);
    randomize(rng, fx.wh);
    randomize(rng, fx.b);
    const Vec x = random_vec(rng, fx.input);
    const Vec h_prev = random_vec(rng, fx.hidden);
    const Vec c_prev = random_vec(rng, fx.hidden);
    Vec h1, c1, h2, c2;
    lstm_cell(fx.params(), x, h_prev, c_prev, h1, c1);
    lstm_cell(fx.params(), x, h_prev, c_prev, h2, c2);
    CHECK(h1 == h2);
    CHECK(c1 == c2);
}

TEST_CASE("lstm sequence backward matches central differences") {
    CellFixture fx;
    Rng rng(17);
    randomize(rng, fx.wx, -0.4, 0.4);
    randomize(rng, fx.wh, -0.4, 0.4);
    randomize(rng, fx.b, -0.2, 0.2);
    std::vector<Vec> xs;
    for (int t = 0; t < 5; ++t) xs.push_back(random_vec(rng, fx.input));
    std::vector<Vec> probes;
    for (int t = 0; t < 5; ++t) probes.push_back(random_vec(rng, fx.hidden));

    auto loss = [&] {
        LstmSeqCache cache;
        lstm_forward(fx.params(), xs, cache);
        double total = 0.0;
        for (size_t t = 0; t < xs.size(); ++t) total += probe(probes[t], cache.steps[t].h);
        return total;
    };

    LstmSeqCache cache;
    lstm_forward(fx.params(), xs, cache);
    Tensor gwx(fx.wx.shape()), gwh(fx.wh.shape()), gb(fx.b.shape());
    LstmGradRefs grads{&gwx, &gwh, &gb};
    std::vector<Vec> dxs(xs.size());
    for (size_t t = 0; t < xs.size(); ++t) dxs[t].assign(fx.input, 0.0);
    lstm_backward(fx.params(), cache, probes, grads, dxs);

    for (size_t i = 0; i < fx.wx.size(); ++i)
        CHECK(rel_err(gwx[i], fd_at(loss, &fx.wx[i])) < 1e-6);
    for (size_t i = 0; i < fx.wh.size(); ++i)
        CHECK(rel_err(gwh[i], fd_at(loss, &fx.wh[i])) < 1e-6);
    for (size_t i = 0; i < fx.b.size(); ++i) CHECK(rel_err(gb[i], fd_at(loss, &fx.b[i])) < 1e-6);
    for (size_t t = 0; t < xs.size(); ++t)
        for (size_t i = 0; i < fx.input; ++i)
            CHECK(rel_err(dxs[t][i], fd_at(loss, &xs[t][i])) < 1e-6);
}

TEST_CASE("bilstm swapped-parameter reversal identity") {
    // BiLSTM(reverse(x); A,B).fwd[t] equals BiLSTM(x; B,A).bwd[len-1-t]
    // bit-for-bit: both run the same cell over the same suffix.
    CellFixture a, b;
    Rng rng(18);
    randomize(rng, a.wx);
    randomize(rng, a.wh);
    randomize(rng, a.b);
    randomize(rng, b.wx);
    randomize(rng, b.wh);
    randomize(rng, b.b);
    std::vector<Vec> xs;
    for (int t = 0; t < 6; ++t) xs.push_back(random_vec(rng, a.input));
    std::vector<Vec> rev(xs.rbegin(), xs.rend());

    BiLstmParams ab{a.params(), b.params()};
    BiLstmParams ba{b.params(), a.params()};
    BiLstmCache c1, c2;
    bilstm_forward(ab, rev, c1);
    bilstm_forward(ba, xs, c2);
    for (size_t t = 0; t < xs.size(); ++t) {
        CHECK(c1.fwd_state(t) == c2.bwd_state(xs.size() - 1 - t));
        CHECK(c1.bwd_state(t) == c2.fwd_state(xs.size() - 1 - t));
    }
}

TEST_CASE("adam first step moves a scalar parameter by about lr") {
    ParamStore store;
    Tensor& p = store.create("p", {1});
    p[0] = 0.0;
    store.grad("p")[0] = 2.0;
    AdamConfig cfg;  // lr 0.001, beta1 0.9, beta2 0.999, eps 1e-8
    store.adam_step(cfg);
    CHECK(std::abs(store.value("p")[0] - (-0.001)) < 1e-6);
    CHECK(store.step() == 1);
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
    ParamStore store;
    store.create_uniform("w", {4, 3}, 9);
    const Tensor before = store.value("w");
    AdamConfig cfg;
    store.zero_grads();
    store.adam_step(cfg);
    store.adam_step(cfg);
    CHECK(store.value("w") == before);
}

TEST_CASE("adam is deterministic across identical runs") {
    auto run = [] {
        ParamStore store;
        store.create_uniform("w", {3, 3}, 21);
        Rng rng(22);
        AdamConfig cfg;
        for (int step = 0; step < 5; ++step) {
            Tensor& g = store.grad("w");
            for (size_t i = 0; i < g.size(); ++i) g[i] = rng.uniform(-1.0, 1.0);
            store.adam_step(cfg);
        }
        return store.value("w");
    };
    CHECK(run() == run());
}

TEST_CASE("accumulate rejects shape mismatches") {
    ParamStore store;
    store.create("w", {2, 2});
    GradMap grads;
    grads.emplace("w", Tensor({3}));
    CHECK_THROWS_AS(store.accumulate(grads, 1.0), ShapeError);
}

TEST_CASE("grad_check on closed forms") {
    ParamStore store;
    Tensor& x = store.create("x", {1});
    x[0] = 3.0;

    SUBCASE("quadratic") {
        auto loss = [&] { return store.value("x")[0] * store.value("x")[0]; };
        auto grads = [&] {
            store.zero_grads();
            store.grad("x")[0] = 2.0 * store.value("x")[0];
        };
        const auto report = grad_check(store, loss, grads, 1e-5, 1e-8);
        CHECK(report.max_rel_err < 1e-8);
        CHECK(report.entries.size() == 1);
        CHECK(report.entries[0].checked == 1);
    }

    SUBCASE("constant loss has zero gradient everywhere") {
        auto loss = [&] { return 42.0; };
        auto grads = [&] { store.zero_grads(); };
        const auto report = grad_check(store, loss, grads, 1e-5);
        CHECK(report.max_rel_err == 0.0);
    }

    SUBCASE("non-deterministic loss is rejected") {
        int calls = 0;
        auto loss = [&] { return static_cast<double>(++calls); };
        auto grads = [&] { store.zero_grads(); };
        CHECK_THROWS_WITH_AS(grad_check(store, loss, grads, 1e-5),
                             doctest::Contains("NonDeterministicLoss"), NumericError);
    }

    SUBCASE("eps outside the sane band is rejected") {
        auto loss = [&] { return 0.0; };
        auto grads = [&] {};
        CHECK_THROWS_AS(grad_check(store, loss, grads, 1e-8), NumericError);
        CHECK_THROWS_AS(grad_check(store, loss, grads, 1e-2), NumericError);
    }
}

TEST_CASE("named tensor container round-trips bit-exactly") {
    std::map<std::string, Tensor> tensors;
    Rng rng(23);
    Tensor a = Tensor::matrix(3, 5);
    randomize(rng, a, -100.0, 100.0);
    a[0] = 0x1.fffffffffffffp+1023;  // extreme but finite values survive
    a[1] = -0x1.0p-1074;
    Tensor b = Tensor::vector(7);
    randomize(rng, b);
    tensors.emplace("layer.weight", a);
    tensors.emplace("layer.bias", b);

    std::stringstream buf;
    write_named_tensors(buf, tensors, "{\"version\":1}");
    const NamedTensorFile file = read_named_tensors(buf);
    CHECK(file.meta_json == "{\"version\":1}");
    REQUIRE(file.tensors.size() == 2);
    CHECK(file.tensors.at("layer.weight") == a);
    CHECK(file.tensors.at("layer.bias") == b);

    SUBCASE("corrupt magic is rejected") {
        std::stringstream bad("not a checkpoint");
        CHECK_THROWS_AS(read_named_tensors(bad), DataError);
    }
}
