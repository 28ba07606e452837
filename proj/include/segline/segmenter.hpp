#pragma once

#include <cstdint>
#include <vector>

#include "segline/lstm.hpp"
#include "segline/tensor.hpp"

namespace segline {

// Per-sentence recurrent states of the sentence-level BiLSTM. fwd/bwd are
// kept separate because the auxiliary task consumes the two streams
// individually; combined[i] = [fwd[i]; bwd[i]].
struct HiddenStates {
    std::vector<Vec> fwd;
    std::vector<Vec> bwd;
    std::vector<Vec> combined;

    size_t size() const { return combined.size(); }
};

struct SentenceLstmCache {
    BiLstmCache lstm;
    HiddenStates states;
};

// Throws ShapeError("TooFewSentences") for fewer than 2 encodings.
void sentence_bilstm(const BiLstmParams& p, const std::vector<Vec>& encodings,
                     SentenceLstmCache& cache);

// Windowed similarity (restricted self-attention score):
//   sim(i,j) = w_a . [h_i; h_j; h_i .* h_j] + b_a
// w_a has length 6*H_s; element-wise product per the concatenation context.
double restricted_similarity(const Tensor& w_a, double b_a, const Vec& h_i, const Vec& h_j);

// Same, but validates |i - j| <= window and throws
// ShapeError("WindowViolation") otherwise.
double restricted_similarity_at(const Tensor& w_a, double b_a, const HiddenStates& states,
                                size_t i, size_t j, size_t window);

struct RsaCache {
    // per sentence: inclusive window [lo, hi], raw sims, softmax weights
    std::vector<std::pair<size_t, size_t>> windows;
    std::vector<Vec> sims;
    std::vector<Vec> weights;
    std::vector<Vec> context;  // c_i, length 2*H_s
};

// Softmax is taken over the valid in-range positions only; edge windows
// truncate and renormalize. Self-position is part of its own window.
void restricted_self_attention(const Tensor& w_a, double b_a, const HiddenStates& states,
                               size_t window, RsaCache& cache);

// Accumulates gradients of sum_i dcontext[i] . c_i into d_h (per-sentence
// combined-state grads), g_wa and g_ba.
void restricted_self_attention_backward(const Tensor& w_a, const HiddenStates& states,
                                        const RsaCache& cache,
                                        const std::vector<Vec>& dcontext, std::vector<Vec>& d_h,
                                        Tensor& g_wa, Tensor& g_ba);

// Greedy threshold decoding: label = 1 iff p > tau (strict).
std::vector<uint8_t> decode(const std::vector<double>& probs, double tau);

}  // namespace segline
