#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segline/corpus.hpp"
#include "segline/embeddings.hpp"
#include "segline/encoder.hpp"
#include "segline/objective.hpp"
#include "segline/params.hpp"
#include "segline/segmenter.hpp"

namespace segline {

struct ModelConfig {
    size_t word_dim = 300;
    size_t word_hidden = 256;
    size_t sent_hidden = 256;
    size_t aux_dim = 128;
    size_t ext_dim = 768;
    size_t rsa_window = 3;
    bool enable_aux = true;
    bool enable_rsa = true;
    bool enable_external = true;
    PoolingMode pooling = PoolingMode::attention;
    double alpha = 0.8;
    double clamp_eps = 1e-12;

    size_t sentence_input_dim() const {
        return 2 * word_hidden + (enable_external ? ext_dim : 0);
    }
    void validate() const;
};

struct DocCache {
    std::vector<SentenceCache> sents;
    std::vector<Vec> encodings;       // se_i
    SentenceLstmCache sent;           // sentence-level BiLSTM
    RsaCache rsa;                     // RSA only
    std::vector<Vec> zin;             // [h_i; c_i], RSA only
    SentenceLstmCache ctx;            // second BiLSTM, RSA only
    std::vector<double> logits;       // k-1
    std::vector<double> probs;        // k-1
    std::vector<PairEmbedding> pairs; // AUX only
    std::vector<double> cohs;         // AUX only
    LossBreakdown loss;
};

// The complete segmenter: word-level encoder, sentence BiLSTM, optional
// restricted self-attention with a second BiLSTM, prediction head, and the
// optional coherence head. Word vectors and the external sentence provider
// are frozen inputs; everything else lives in the ParamStore.
class SegmenterModel {
public:
    SegmenterModel(ModelConfig cfg, uint64_t seed, const WordTable* words,
                   const SentenceEmbeddingProvider* provider);

    SegmenterModel(const SegmenterModel&) = delete;
    SegmenterModel& operator=(const SegmenterModel&) = delete;

    const ModelConfig& config() const { return cfg_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    // Forward pass with losses; requires doc.validate() to hold.
    void forward(const Document& doc, DocCache& cache) const;

    // Boundary probabilities for sentences 1..k-1 (length k-1).
    std::vector<double> predict(const Document& doc) const;
    std::vector<double> predict(const std::vector<std::vector<std::string>>& sentences,
                                const std::string& doc_id) const;

    // Accumulates d L_total / d theta into `grads` for one document.
    void backward(const Document& doc, const DocCache& cache, GradMap& grads) const;

    // Convenience: forward + backward, returns the loss breakdown.
    LossBreakdown forward_backward(const Document& doc, GradMap& grads) const;

private:
    void run_forward(const std::vector<std::vector<std::string>>& sentences,
                     const std::string& doc_id, DocCache& cache) const;
    void bind_params();

    ModelConfig cfg_;
    ParamStore params_;
    const WordTable* words_;
    const SentenceEmbeddingProvider* provider_;

    EncoderParams enc_;
    BiLstmParams sent_lstm_;
    const Tensor* rsa_w_ = nullptr;
    const Tensor* rsa_b_ = nullptr;
    BiLstmParams ctx_lstm_;
    const Tensor* head_w_ = nullptr;
    const Tensor* head_b_ = nullptr;
    const Tensor* aux_we_ = nullptr;
    const Tensor* aux_be_ = nullptr;
};

}  // namespace segline
