#include "segline/segmenter.hpp"

#include <algorithm>
#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/ops.hpp"

namespace segline {

void sentence_bilstm(const BiLstmParams& p, const std::vector<Vec>& encodings,
                     SentenceLstmCache& cache) {
    if (encodings.size() < 2)
        throw ShapeError("TooFewSentences: sentence BiLSTM needs at least 2 sentences, got " +
                         std::to_string(encodings.size()));
    bilstm_forward(p, encodings, cache.lstm);
    const size_t k = encodings.size();
    cache.states.fwd.resize(k);
    cache.states.bwd.resize(k);
    cache.states.combined.resize(k);
    for (size_t i = 0; i < k; ++i) {
        cache.states.fwd[i] = cache.lstm.fwd_state(i);
        cache.states.bwd[i] = cache.lstm.bwd_state(i);
        cache.states.combined[i] = concat(cache.states.fwd[i], cache.states.bwd[i]);
    }
}

double restricted_similarity(const Tensor& w_a, double b_a, const Vec& h_i, const Vec& h_j) {
    if (h_i.size() != h_j.size()) throw ShapeError("ShapeMismatch: similarity state lengths");
    const size_t d = h_i.size();
    if (w_a.size() != 3 * d)
        throw ShapeError("ShapeMismatch: w_a length " + std::to_string(w_a.size()) +
                         ", expected " + std::to_string(3 * d));
    const auto& k = kernels::ops();
    double sim = b_a;
    sim += k.dot(w_a.data(), h_i.data(), d);
    sim += k.dot(w_a.data() + d, h_j.data(), d);
    // third block pairs with the element-wise product h_i .* h_j
    const double* w3 = w_a.data() + 2 * d;
    double acc = 0.0;
    for (size_t x = 0; x < d; ++x) acc += w3[x] * h_i[x] * h_j[x];
    return sim + acc;
}

double restricted_similarity_at(const Tensor& w_a, double b_a, const HiddenStates& states,
                                size_t i, size_t j, size_t window) {
    const size_t dist = i > j ? i - j : j - i;
    if (dist > window)
        throw ShapeError("WindowViolation: |" + std::to_string(i) + " - " + std::to_string(j) +
                         "| exceeds window " + std::to_string(window));
    if (i >= states.size() || j >= states.size())
        throw ShapeError("WindowViolation: sentence index out of range");
    return restricted_similarity(w_a, b_a, states.combined[i], states.combined[j]);
}

void restricted_self_attention(const Tensor& w_a, double b_a, const HiddenStates& states,
                               size_t window, RsaCache& cache) {
    if (window < 1) throw ShapeError("restricted self-attention window must be >= 1");
    const size_t k = states.size();
    if (k < 2) throw ShapeError("TooFewSentences: restricted self-attention needs >= 2");
    cache.windows.resize(k);
    cache.sims.resize(k);
    cache.weights.resize(k);
    cache.context.resize(k);
    const size_t dim = states.combined[0].size();
    for (size_t i = 0; i < k; ++i) {
        const size_t lo = i >= window ? i - window : 0;
        const size_t hi = std::min(k - 1, i + window);
        cache.windows[i] = {lo, hi};
        Vec sims(hi - lo + 1);
        for (size_t j = lo; j <= hi; ++j) {
            sims[j - lo] = restricted_similarity(w_a, b_a, states.combined[i],
                                                 states.combined[j]);
        }
        cache.weights[i] = softmax_vec(sims);
        cache.sims[i] = std::move(sims);
        cache.context[i].assign(dim, 0.0);
        for (size_t j = lo; j <= hi; ++j) {
            kernels::ops().axpy(cache.weights[i][j - lo], states.combined[j].data(),
                                cache.context[i].data(), dim);
        }
    }
}

void restricted_self_attention_backward(const Tensor& w_a, const HiddenStates& states,
                                        const RsaCache& cache,
                                        const std::vector<Vec>& dcontext, std::vector<Vec>& d_h,
                                        Tensor& g_wa, Tensor& g_ba) {
    const size_t k = states.size();
    const size_t dim = states.combined[0].size();
    const auto& kr = kernels::ops();
    for (size_t i = 0; i < k; ++i) {
        const auto [lo, hi] = cache.windows[i];
        const size_t width = hi - lo + 1;
        // c_i = sum_j a_ij h_j
        Vec d_weights(width, 0.0);
        for (size_t j = lo; j <= hi; ++j) {
            d_weights[j - lo] = kr.dot(dcontext[i].data(), states.combined[j].data(), dim);
            kr.axpy(cache.weights[i][j - lo], dcontext[i].data(), d_h[j].data(), dim);
        }
        const Vec d_sims = softmax_backward(cache.weights[i], d_weights);
        for (size_t j = lo; j <= hi; ++j) {
            const double ds = d_sims[j - lo];
            if (ds == 0.0) continue;
            const Vec& hi_v = states.combined[i];
            const Vec& hj_v = states.combined[j];
            // sim = w1.h_i + w2.h_j + w3.(h_i.*h_j) + b
            kr.axpy(ds, hi_v.data(), g_wa.data(), dim);
            kr.axpy(ds, hj_v.data(), g_wa.data() + dim, dim);
            double* g3 = g_wa.data() + 2 * dim;
            const double* w1 = w_a.data();
            const double* w2 = w_a.data() + dim;
            const double* w3 = w_a.data() + 2 * dim;
            for (size_t x = 0; x < dim; ++x) {
                g3[x] += ds * hi_v[x] * hj_v[x];
                d_h[i][x] += ds * (w1[x] + w3[x] * hj_v[x]);
                d_h[j][x] += ds * (w2[x] + w3[x] * hi_v[x]);
            }
            g_ba[0] += ds;
        }
    }
}

std::vector<uint8_t> decode(const std::vector<double>& probs, double tau) {
    if (tau <= 0.0 || tau >= 1.0)
        throw NumericError("decode threshold must lie in (0,1), got " + std::to_string(tau));
    std::vector<uint8_t> labels(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) labels[i] = probs[i] > tau ? 1 : 0;
    return labels;
}

}  // namespace segline
