#pragma once

#include <vector>

#include "segline/lstm.hpp"
#include "segline/tensor.hpp"

namespace segline {

enum class PoolingMode { attention, max };

PoolingMode pooling_from_string(const std::string& s);
const char* pooling_to_string(PoolingMode m);

// Word-level sentence encoder: BiLSTM over token vectors, pooled to one
// vector, concatenated with the external sentence embedding.
struct EncoderParams {
    BiLstmParams word_lstm;
    // Attention pooling (Yang-style): u_t = tanh(W h_t + b), weights =
    // softmax(u_t . ctx), output = sum_t weight_t h_t. Null under max pooling.
    const Tensor* pool_w = nullptr;
    const Tensor* pool_b = nullptr;
    const Tensor* pool_ctx = nullptr;
    PoolingMode pooling = PoolingMode::attention;
};

struct EncoderGradRefs {
    BiLstmGradRefs word_lstm;
    Tensor* pool_w = nullptr;
    Tensor* pool_b = nullptr;
    Tensor* pool_ctx = nullptr;
};

struct PoolCache {
    std::vector<Vec> u;   // projected tanh vectors (attention)
    Vec scores;           // pre-softmax
    Vec weights;          // softmax weights
    std::vector<size_t> argmax;  // per-dimension winner (max pooling)
};

struct SentenceCache {
    std::vector<Vec> xs;      // token embeddings
    BiLstmCache lstm;
    std::vector<Vec> states;  // concatenated [fwd; bwd] per token, length 2*H_w
    PoolCache pool;
    Vec pooled;
    Vec external;
    Vec se;                   // [pooled; external]
};

// Per-token bidirectional states; throws ShapeError("EmptySentence") on an
// empty token list.
void encode_tokens(const EncoderParams& p, const std::vector<Vec>& token_vecs,
                   SentenceCache& cache);

// Pools cache.states into cache.pooled.
void pool_states(const EncoderParams& p, SentenceCache& cache);

// cache.se = [pooled; external]; external may be empty (provider disabled).
void compose_sentence(SentenceCache& cache, Vec external);

// Runs the full encoder; returns cache.se.
const Vec& encode_sentence(const EncoderParams& p, const std::vector<Vec>& token_vecs,
                           Vec external, SentenceCache& cache);

// Backward through compose -> pool -> BiLSTM. d_se is the gradient w.r.t.
// cache.se; token-vector gradients land in d_tokens when non-null (word
// embeddings are frozen, so training passes null).
void encoder_backward(const EncoderParams& p, const SentenceCache& cache, const Vec& d_se,
                      const EncoderGradRefs& grads, std::vector<Vec>* d_tokens = nullptr);

}  // namespace segline
