#include "segline/encoder.hpp"

#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/ops.hpp"

namespace segline {

PoolingMode pooling_from_string(const std::string& s) {
    if (s == "attention") return PoolingMode::attention;
    if (s == "max") return PoolingMode::max;
    throw DataError("unknown pooling mode: " + s + " (expected attention|max)");
}

const char* pooling_to_string(PoolingMode m) {
    return m == PoolingMode::attention ? "attention" : "max";
}

void encode_tokens(const EncoderParams& p, const std::vector<Vec>& token_vecs,
                   SentenceCache& cache) {
    if (token_vecs.empty()) throw ShapeError("EmptySentence: encoder needs at least one token");
    cache.xs = token_vecs;
    bilstm_forward(p.word_lstm, cache.xs, cache.lstm);
    const size_t len = token_vecs.size();
    cache.states.resize(len);
    for (size_t t = 0; t < len; ++t) {
        cache.states[t] = concat(cache.lstm.fwd_state(t), cache.lstm.bwd_state(t));
    }
}

void pool_states(const EncoderParams& p, SentenceCache& cache) {
    const auto& states = cache.states;
    const size_t len = states.size();
    const size_t dim = states[0].size();
    PoolCache& pc = cache.pool;

    if (p.pooling == PoolingMode::max) {
        pc.argmax.assign(dim, 0);
        cache.pooled.assign(dim, 0.0);
        for (size_t j = 0; j < dim; ++j) {
            size_t best = 0;
            for (size_t t = 1; t < len; ++t) {
                if (states[t][j] > states[best][j]) best = t;
            }
            pc.argmax[j] = best;
            cache.pooled[j] = states[best][j];
        }
        return;
    }

    pc.u.resize(len);
    pc.scores.assign(len, 0.0);
    const Vec bias(p.pool_b->data(), p.pool_b->data() + p.pool_b->size());
    for (size_t t = 0; t < len; ++t) {
        pc.u[t] = tanh_vec(affine(*p.pool_w, states[t], bias));
        pc.scores[t] =
            kernels::ops().dot(pc.u[t].data(), p.pool_ctx->data(), pc.u[t].size());
    }
    pc.weights = softmax_vec(pc.scores);
    cache.pooled.assign(dim, 0.0);
    for (size_t t = 0; t < len; ++t) {
        kernels::ops().axpy(pc.weights[t], states[t].data(), cache.pooled.data(), dim);
    }
}

void compose_sentence(SentenceCache& cache, Vec external) {
    cache.external = std::move(external);
    cache.se = concat(cache.pooled, cache.external);
}

const Vec& encode_sentence(const EncoderParams& p, const std::vector<Vec>& token_vecs,
                           Vec external, SentenceCache& cache) {
    encode_tokens(p, token_vecs, cache);
    pool_states(p, cache);
    compose_sentence(cache, std::move(external));
    return cache.se;
}

void encoder_backward(const EncoderParams& p, const SentenceCache& cache, const Vec& d_se,
                      const EncoderGradRefs& grads, std::vector<Vec>* d_tokens) {
    const size_t len = cache.states.size();
    const size_t dim = cache.pooled.size();
    if (d_se.size() != cache.se.size()) throw ShapeError("ShapeMismatch: encoder_backward d_se");

    // split off the external part (not trainable)
    Vec d_pooled(d_se.begin(), d_se.begin() + static_cast<ptrdiff_t>(dim));

    std::vector<Vec> d_states(len, Vec(dim, 0.0));
    if (p.pooling == PoolingMode::max) {
        for (size_t j = 0; j < dim; ++j) d_states[cache.pool.argmax[j]][j] += d_pooled[j];
    } else {
        const PoolCache& pc = cache.pool;
        Vec d_scores_raw(len, 0.0);
        for (size_t t = 0; t < len; ++t) {
            // pooled = sum_t w_t * state_t
            kernels::ops().axpy(pc.weights[t], d_pooled.data(), d_states[t].data(), dim);
            d_scores_raw[t] =
                kernels::ops().dot(d_pooled.data(), cache.states[t].data(), dim);
        }
        const Vec d_scores = softmax_backward(pc.weights, d_scores_raw);
        for (size_t t = 0; t < len; ++t) {
            // score_t = u_t . ctx
            Vec d_u(pc.u[t].size(), 0.0);
            kernels::ops().axpy(d_scores[t], p.pool_ctx->data(), d_u.data(), d_u.size());
            kernels::ops().axpy(d_scores[t], pc.u[t].data(), grads.pool_ctx->data(),
                                pc.u[t].size());
            const Vec d_pre = tanh_backward(pc.u[t], d_u);
            Vec gb(d_pre.size(), 0.0);
            Vec gx(dim, 0.0);
            affine_backward(*p.pool_w, cache.states[t], d_pre, *grads.pool_w, gb, gx);
            kernels::ops().axpy(1.0, gb.data(), grads.pool_b->data(), gb.size());
            kernels::ops().axpy(1.0, gx.data(), d_states[t].data(), dim);
        }
    }

    // split token-state gradients into fwd/bwd streams
    const size_t h = p.word_lstm.hidden();
    std::vector<Vec> dfwd(len), dbwd(len);
    for (size_t t = 0; t < len; ++t) {
        dfwd[t].assign(d_states[t].begin(), d_states[t].begin() + static_cast<ptrdiff_t>(h));
        dbwd[t].assign(d_states[t].begin() + static_cast<ptrdiff_t>(h), d_states[t].end());
    }
    std::vector<Vec> dxs(len);
    for (size_t t = 0; t < len; ++t) dxs[t].assign(cache.xs[t].size(), 0.0);
    bilstm_backward(p.word_lstm, cache.lstm, dfwd, dbwd, grads.word_lstm, dxs);
    if (d_tokens != nullptr) *d_tokens = std::move(dxs);
}

}  // namespace segline
