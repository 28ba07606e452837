#include "segline/lstm.hpp"

#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/ops.hpp"

namespace segline {

namespace {

void check_dims(const LstmParams& p, const Vec& x) {
    const size_t h = p.hidden();
    if (p.wx->rows() != 4 * h || p.wh->rows() != 4 * h || p.wh->cols() != h)
        throw ShapeError("ShapeMismatch: LSTM weight shapes disagree with bias length");
    if (x.size() != p.input())
        throw ShapeError("ShapeMismatch: LSTM input length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(p.input()));
}

}  // namespace

void lstm_cell(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev, Vec& h_out,
               Vec& c_out, LstmStep* step) {
    check_dims(p, x);
    const size_t h = p.hidden();
    if (!h_prev.empty() && h_prev.size() != h)
        throw ShapeError("ShapeMismatch: LSTM h_prev length");
    if (!c_prev.empty() && c_prev.size() != h)
        throw ShapeError("ShapeMismatch: LSTM c_prev length");

    const auto& k = kernels::ops();
    Vec z(p.b->data(), p.b->data() + 4 * h);
    k.matvec_acc(p.wx->data(), x.data(), 4 * h, p.input(), z.data());
    if (!h_prev.empty()) k.matvec_acc(p.wh->data(), h_prev.data(), 4 * h, h, z.data());

    Vec gates(4 * h);
    for (size_t j = 0; j < h; ++j) {
        gates[j] = sigmoid(z[j]);                      // input
        gates[h + j] = sigmoid(z[h + j]);              // forget
        gates[2 * h + j] = std::tanh(z[2 * h + j]);    // candidate
        gates[3 * h + j] = sigmoid(z[3 * h + j]);      // output
    }

    c_out.assign(h, 0.0);
    for (size_t j = 0; j < h; ++j) {
        const double cp = c_prev.empty() ? 0.0 : c_prev[j];
        c_out[j] = gates[h + j] * cp + gates[j] * gates[2 * h + j];
    }
    Vec tanh_c(h);
    h_out.assign(h, 0.0);
    for (size_t j = 0; j < h; ++j) {
        tanh_c[j] = std::tanh(c_out[j]);
        h_out[j] = gates[3 * h + j] * tanh_c[j];
    }

    if (step != nullptr) {
        step->gates = std::move(gates);
        step->c = c_out;
        step->tanh_c = std::move(tanh_c);
        step->h = h_out;
    }
}

void lstm_forward(const LstmParams& p, const std::vector<Vec>& xs, LstmSeqCache& cache) {
    cache.xs = xs;
    cache.steps.assign(xs.size(), LstmStep{});
    Vec h, c;
    for (size_t t = 0; t < xs.size(); ++t) {
        Vec h_next, c_next;
        lstm_cell(p, xs[t], h, c, h_next, c_next, &cache.steps[t]);
        h = std::move(h_next);
        c = std::move(c_next);
    }
}

void lstm_backward(const LstmParams& p, const LstmSeqCache& cache, const std::vector<Vec>& dh,
                   const LstmGradRefs& grads, std::vector<Vec>& dxs) {
    const size_t len = cache.size();
    if (dh.size() != len || dxs.size() != len)
        throw ShapeError("ShapeMismatch: lstm_backward sequence lengths");
    const size_t h = p.hidden();
    const auto& k = kernels::ops();

    Vec dh_next(h, 0.0);  // gradient flowing into h[t] from step t+1
    Vec dc_next(h, 0.0);
    Vec dz(4 * h);
    for (size_t ti = len; ti-- > 0;) {
        const LstmStep& st = cache.steps[ti];
        const Vec* c_prev = ti > 0 ? &cache.steps[ti - 1].c : nullptr;
        const Vec* h_prev = ti > 0 ? &cache.steps[ti - 1].h : nullptr;

        for (size_t j = 0; j < h; ++j) {
            const double dht = dh[ti][j] + dh_next[j];
            const double i_g = st.gates[j];
            const double f_g = st.gates[h + j];
            const double g_g = st.gates[2 * h + j];
            const double o_g = st.gates[3 * h + j];
            const double tc = st.tanh_c[j];
            const double dc = dc_next[j] + dht * o_g * (1.0 - tc * tc);
            const double cp = c_prev ? (*c_prev)[j] : 0.0;

            const double d_o = dht * tc;
            const double d_i = dc * g_g;
            const double d_f = dc * cp;
            const double d_g = dc * i_g;
            dc_next[j] = dc * f_g;

            dz[j] = d_i * i_g * (1.0 - i_g);
            dz[h + j] = d_f * f_g * (1.0 - f_g);
            dz[2 * h + j] = d_g * (1.0 - g_g * g_g);
            dz[3 * h + j] = d_o * o_g * (1.0 - o_g);
        }

        k.outer_acc(dz.data(), cache.xs[ti].data(), 4 * h, p.input(), grads.wx->data());
        k.axpy(1.0, dz.data(), grads.b->data(), 4 * h);
        k.matvec_t_acc(p.wx->data(), dz.data(), 4 * h, p.input(), dxs[ti].data());
        if (h_prev != nullptr) {
            k.outer_acc(dz.data(), h_prev->data(), 4 * h, h, grads.wh->data());
            dh_next.assign(h, 0.0);
            k.matvec_t_acc(p.wh->data(), dz.data(), 4 * h, h, dh_next.data());
        }
    }
}

void bilstm_forward(const BiLstmParams& p, const std::vector<Vec>& xs, BiLstmCache& cache) {
    cache.len = xs.size();
    lstm_forward(p.fwd, xs, cache.fwd);
    std::vector<Vec> rev(xs.rbegin(), xs.rend());
    lstm_forward(p.bwd, rev, cache.bwd);
}

void bilstm_backward(const BiLstmParams& p, const BiLstmCache& cache,
                     const std::vector<Vec>& dfwd, const std::vector<Vec>& dbwd,
                     const BiLstmGradRefs& grads, std::vector<Vec>& dxs) {
    const size_t len = cache.len;
    if (dfwd.size() != len || dbwd.size() != len || dxs.size() != len)
        throw ShapeError("ShapeMismatch: bilstm_backward sequence lengths");

    lstm_backward(p.fwd, cache.fwd, dfwd, grads.fwd, dxs);

    std::vector<Vec> dbwd_rev(dbwd.rbegin(), dbwd.rend());
    std::vector<Vec> dxs_rev(len);
    for (size_t t = 0; t < len; ++t) dxs_rev[t].assign(dxs[len - 1 - t].size(), 0.0);
    lstm_backward(p.bwd, cache.bwd, dbwd_rev, grads.bwd, dxs_rev);
    for (size_t t = 0; t < len; ++t) {
        kernels::ops().axpy(1.0, dxs_rev[t].data(), dxs[len - 1 - t].data(), dxs_rev[t].size());
    }
}

}  // namespace segline
