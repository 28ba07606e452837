#include "segline/model.hpp"

#include <algorithm>
#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/ops.hpp"

namespace segline {

void ModelConfig::validate() const {
    if (word_dim == 0 || word_hidden == 0 || sent_hidden == 0)
        throw DataError("model dimensions must be positive");
    if (enable_aux && aux_dim == 0) throw DataError("aux_dim must be positive");
    if (enable_external && ext_dim == 0) throw DataError("ext_dim must be positive");
    if (enable_rsa && rsa_window == 0) throw DataError("rsa_window must be >= 1");
    if (alpha < 0.0 || alpha > 1.0) throw NumericError("AlphaOutOfRange: " + std::to_string(alpha));
    if (clamp_eps <= 0.0 || clamp_eps >= 0.5) throw DataError("clamp_eps must lie in (0, 0.5)");
}

SegmenterModel::SegmenterModel(ModelConfig cfg, uint64_t seed, const WordTable* words,
                               const SentenceEmbeddingProvider* provider)
    : cfg_(cfg), words_(words), provider_(provider) {
    cfg_.validate();
    if (words_ == nullptr) throw Error("SegmenterModel needs a word table");
    if (words_->dim() != cfg_.word_dim)
        throw DataError("word table dim " + std::to_string(words_->dim()) +
                        " does not match configured word_dim " + std::to_string(cfg_.word_dim));
    if (cfg_.enable_external) {
        if (provider_ == nullptr)
            throw Error("external embeddings enabled but no provider given");
        if (provider_->dim() != cfg_.ext_dim)
            throw DataError("sentence provider dim " + std::to_string(provider_->dim()) +
                            " does not match configured ext_dim " + std::to_string(cfg_.ext_dim));
    }

    const size_t hw = cfg_.word_hidden;
    const size_t hs = cfg_.sent_hidden;
    const size_t se_dim = cfg_.sentence_input_dim();

    auto make_lstm = [&](const std::string& prefix, size_t input, size_t hidden) {
        params_.create_uniform(prefix + ".wx", {4 * hidden, input}, seed);
        params_.create_uniform(prefix + ".wh", {4 * hidden, hidden}, seed);
        params_.create_uniform(prefix + ".b", {4 * hidden}, seed);
    };

    make_lstm("word_lstm.fwd", cfg_.word_dim, hw);
    make_lstm("word_lstm.bwd", cfg_.word_dim, hw);
    if (cfg_.pooling == PoolingMode::attention) {
        params_.create_uniform("pool.w", {2 * hw, 2 * hw}, seed);
        params_.create_uniform("pool.b", {2 * hw}, seed);
        params_.create_uniform("pool.ctx", {2 * hw}, seed);
    }
    make_lstm("sent_lstm.fwd", se_dim, hs);
    make_lstm("sent_lstm.bwd", se_dim, hs);
    if (cfg_.enable_rsa) {
        params_.create_uniform("rsa.w", {6 * hs}, seed);
        params_.create_uniform("rsa.b", {1}, seed);
        make_lstm("ctx_lstm.fwd", 4 * hs, hs);
        make_lstm("ctx_lstm.bwd", 4 * hs, hs);
    }
    if (cfg_.enable_aux) {
        params_.create_uniform("aux.we", {cfg_.aux_dim, hs}, seed);
        params_.create_uniform("aux.be", {cfg_.aux_dim}, seed);
    }
    params_.create_uniform("head.w", {2 * hs}, seed);
    params_.create_uniform("head.b", {1}, seed);

    bind_params();
}

void SegmenterModel::bind_params() {
    auto lstm_view = [&](const std::string& prefix) {
        LstmParams p;
        p.wx = &params_.value(prefix + ".wx");
        p.wh = &params_.value(prefix + ".wh");
        p.b = &params_.value(prefix + ".b");
        return p;
    };
    enc_.word_lstm.fwd = lstm_view("word_lstm.fwd");
    enc_.word_lstm.bwd = lstm_view("word_lstm.bwd");
    enc_.pooling = cfg_.pooling;
    if (cfg_.pooling == PoolingMode::attention) {
        enc_.pool_w = &params_.value("pool.w");
        enc_.pool_b = &params_.value("pool.b");
        enc_.pool_ctx = &params_.value("pool.ctx");
    }
    sent_lstm_.fwd = lstm_view("sent_lstm.fwd");
    sent_lstm_.bwd = lstm_view("sent_lstm.bwd");
    if (cfg_.enable_rsa) {
        rsa_w_ = &params_.value("rsa.w");
        rsa_b_ = &params_.value("rsa.b");
        ctx_lstm_.fwd = lstm_view("ctx_lstm.fwd");
        ctx_lstm_.bwd = lstm_view("ctx_lstm.bwd");
    }
    if (cfg_.enable_aux) {
        aux_we_ = &params_.value("aux.we");
        aux_be_ = &params_.value("aux.be");
    }
    head_w_ = &params_.value("head.w");
    head_b_ = &params_.value("head.b");
}

void SegmenterModel::run_forward(const std::vector<std::vector<std::string>>& sentences,
                                 const std::string& doc_id, DocCache& cache) const {
    const size_t k = sentences.size();
    if (k < 2)
        throw DataError("FewerThanTwoSentences: cannot segment " + std::to_string(k) +
                        " sentence(s)");

    cache.sents.assign(k, SentenceCache{});
    cache.encodings.resize(k);
    for (size_t i = 0; i < k; ++i) {
        if (sentences[i].empty())
            throw DataError("MalformedRecord: empty sentence " + std::to_string(i));
        std::vector<Vec> token_vecs;
        token_vecs.reserve(sentences[i].size());
        for (const auto& tok : sentences[i]) token_vecs.push_back(words_->embed(tok));
        Vec external;
        if (cfg_.enable_external) external = provider_->embed(doc_id, i, sentences[i]);
        cache.encodings[i] = encode_sentence(enc_, token_vecs, std::move(external), cache.sents[i]);
    }

    sentence_bilstm(sent_lstm_, cache.encodings, cache.sent);

    const std::vector<Vec>* head_src = &cache.sent.states.combined;
    if (cfg_.enable_rsa) {
        restricted_self_attention(*rsa_w_, (*rsa_b_)[0], cache.sent.states, cfg_.rsa_window,
                                  cache.rsa);
        cache.zin.resize(k);
        for (size_t i = 0; i < k; ++i) {
            cache.zin[i] = concat(cache.sent.states.combined[i], cache.rsa.context[i]);
        }
        sentence_bilstm(ctx_lstm_, cache.zin, cache.ctx);
        head_src = &cache.ctx.states.combined;
    }

    cache.logits.resize(k - 1);
    cache.probs.resize(k - 1);
    for (size_t i = 0; i + 1 < k; ++i) {
        const double z =
            kernels::ops().dot(head_w_->data(), (*head_src)[i].data(), head_w_->size()) +
            (*head_b_)[0];
        cache.logits[i] = z;
        cache.probs[i] = sigmoid(z);
    }
}

void SegmenterModel::forward(const Document& doc, DocCache& cache) const {
    run_forward(doc.sentences, doc.id, cache);
    const size_t k = doc.num_sentences();
    cache.loss = LossBreakdown{};
    cache.loss.l1 = main_loss(cache.probs, doc.boundary_labels, cfg_.clamp_eps);
    if (cfg_.enable_aux) {
        const auto aux = aux_labels(doc);
        cache.pairs.resize(k - 1);
        cache.cohs.resize(k - 1);
        for (size_t i = 0; i + 1 < k; ++i) {
            cache.pairs[i] = pair_embeddings(cache.sent.states, i, *aux_we_, *aux_be_);
            cache.cohs[i] = coherence(cache.pairs[i].e_fwd, cache.pairs[i].e_bwd);
        }
        cache.loss.l2 = aux_loss(cache.cohs, aux, cfg_.clamp_eps);
        cache.loss.alpha = cfg_.alpha;
        cache.loss.total = total_loss(cache.loss.l1, cache.loss.l2, cfg_.alpha);
    } else {
        cache.loss.l2 = 0.0;
        cache.loss.alpha = 1.0;
        cache.loss.total = cache.loss.l1;
    }
}

std::vector<double> SegmenterModel::predict(const Document& doc) const {
    DocCache cache;
    run_forward(doc.sentences, doc.id, cache);
    return cache.probs;
}

std::vector<double> SegmenterModel::predict(
    const std::vector<std::vector<std::string>>& sentences, const std::string& doc_id) const {
    DocCache cache;
    run_forward(sentences, doc_id, cache);
    return cache.probs;
}

void SegmenterModel::backward(const Document& doc, const DocCache& cache, GradMap& grads) const {
    const size_t k = doc.num_sentences();
    const size_t hs = cfg_.sent_hidden;
    const auto& kr = kernels::ops();

    auto lstm_grads = [&](const std::string& prefix) {
        LstmGradRefs g;
        g.wx = &grad_slot(grads, prefix + ".wx", params_.value(prefix + ".wx"));
        g.wh = &grad_slot(grads, prefix + ".wh", params_.value(prefix + ".wh"));
        g.b = &grad_slot(grads, prefix + ".b", params_.value(prefix + ".b"));
        return g;
    };

    const double l1_scale = cfg_.enable_aux ? cfg_.alpha : 1.0;
    const double l2_scale = cfg_.enable_aux ? 1.0 - cfg_.alpha : 0.0;

    // --- prediction head ---
    Tensor& g_head_w = grad_slot(grads, "head.w", *head_w_);
    Tensor& g_head_b = grad_slot(grads, "head.b", *head_b_);
    const std::vector<Vec>& head_src =
        cfg_.enable_rsa ? cache.ctx.states.combined : cache.sent.states.combined;
    std::vector<Vec> d_head_src(k, Vec(2 * hs, 0.0));
    for (size_t i = 0; i + 1 < k; ++i) {
        // d L1 / d logit = p - y (clamp inactive in any non-saturated regime)
        const double dlogit =
            l1_scale * (cache.probs[i] - static_cast<double>(doc.boundary_labels[i]));
        if (dlogit == 0.0) continue;
        kr.axpy(dlogit, head_src[i].data(), g_head_w.data(), 2 * hs);
        g_head_b[0] += dlogit;
        kr.axpy(dlogit, head_w_->data(), d_head_src[i].data(), 2 * hs);
    }

    // --- second BiLSTM and RSA (when enabled) ---
    std::vector<Vec> d_h(k, Vec(2 * hs, 0.0));  // grads w.r.t. sentence states h_i
    if (cfg_.enable_rsa) {
        std::vector<Vec> dfwd(k, Vec(hs, 0.0)), dbwd(k, Vec(hs, 0.0));
        for (size_t i = 0; i < k; ++i) {
            std::copy(d_head_src[i].begin(), d_head_src[i].begin() + static_cast<ptrdiff_t>(hs),
                      dfwd[i].begin());
            std::copy(d_head_src[i].begin() + static_cast<ptrdiff_t>(hs), d_head_src[i].end(),
                      dbwd[i].begin());
        }
        std::vector<Vec> dzin(k);
        for (size_t i = 0; i < k; ++i) dzin[i].assign(4 * hs, 0.0);
        BiLstmGradRefs ctx_g{lstm_grads("ctx_lstm.fwd"), lstm_grads("ctx_lstm.bwd")};
        bilstm_backward(ctx_lstm_, cache.ctx.lstm, dfwd, dbwd, ctx_g, dzin);

        std::vector<Vec> dcontext(k, Vec(2 * hs, 0.0));
        for (size_t i = 0; i < k; ++i) {
            kr.axpy(1.0, dzin[i].data(), d_h[i].data(), 2 * hs);
            kr.axpy(1.0, dzin[i].data() + 2 * hs, dcontext[i].data(), 2 * hs);
        }
        Tensor& g_rsa_w = grad_slot(grads, "rsa.w", *rsa_w_);
        Tensor& g_rsa_b = grad_slot(grads, "rsa.b", *rsa_b_);
        restricted_self_attention_backward(*rsa_w_, cache.sent.states, cache.rsa, dcontext, d_h,
                                           g_rsa_w, g_rsa_b);
    } else {
        d_h = std::move(d_head_src);
    }

    // --- split into forward/backward streams, add aux contributions ---
    std::vector<Vec> d_fwd(k, Vec(hs, 0.0)), d_bwd(k, Vec(hs, 0.0));
    for (size_t i = 0; i < k; ++i) {
        std::copy(d_h[i].begin(), d_h[i].begin() + static_cast<ptrdiff_t>(hs), d_fwd[i].begin());
        std::copy(d_h[i].begin() + static_cast<ptrdiff_t>(hs), d_h[i].end(), d_bwd[i].begin());
    }

    if (cfg_.enable_aux && l2_scale != 0.0) {
        Tensor& g_we = grad_slot(grads, "aux.we", *aux_we_);
        Tensor& g_be = grad_slot(grads, "aux.be", *aux_be_);
        const auto aux = aux_labels(doc);
        for (size_t i = 0; i + 1 < k; ++i) {
            const PairEmbedding& pe = cache.pairs[i];
            const double coh = cache.cohs[i];
            // d L2 / d Coh; coherence lives in (sigmoid(-1), sigmoid(1)) so
            // the clamp never binds here
            const double d_coh = l2_scale * (aux[i] ? -1.0 / coh : 1.0 / (1.0 - coh));
            const double d_cos = d_coh * coh * (1.0 - coh);
            Vec d_ef(pe.e_fwd.size(), 0.0), d_eb(pe.e_bwd.size(), 0.0);
            cosine_backward(pe.e_fwd, pe.e_bwd, d_cos, d_ef, d_eb);

            const Vec d_pre_f = tanh_backward(pe.e_fwd, d_ef);
            Vec g_be_tmp(cfg_.aux_dim, 0.0);
            Vec d_fd(hs, 0.0);
            affine_backward(*aux_we_, pe.fwd_diff, d_pre_f, g_we, g_be_tmp, d_fd);
            kr.axpy(1.0, g_be_tmp.data(), g_be.data(), cfg_.aux_dim);
            kr.axpy(1.0, d_fd.data(), d_fwd[i].data(), hs);
            if (i > 0) kr.axpy(-1.0, d_fd.data(), d_fwd[i - 1].data(), hs);

            const Vec d_pre_b = tanh_backward(pe.e_bwd, d_eb);
            g_be_tmp.assign(cfg_.aux_dim, 0.0);
            Vec d_bd(hs, 0.0);
            affine_backward(*aux_we_, pe.bwd_diff, d_pre_b, g_we, g_be_tmp, d_bd);
            kr.axpy(1.0, g_be_tmp.data(), g_be.data(), cfg_.aux_dim);
            kr.axpy(1.0, d_bd.data(), d_bwd[i + 1].data(), hs);
            if (i + 2 < k) kr.axpy(-1.0, d_bd.data(), d_bwd[i + 2].data(), hs);
        }
    } else if (cfg_.enable_aux) {
        // alpha == 1: aux head gets zero gradient but must appear in the map
        // so optimizer bookkeeping sees every parameter.
        grad_slot(grads, "aux.we", *aux_we_);
        grad_slot(grads, "aux.be", *aux_be_);
    }

    // --- sentence BiLSTM ---
    const size_t se_dim = cfg_.sentence_input_dim();
    std::vector<Vec> d_se(k);
    for (size_t i = 0; i < k; ++i) d_se[i].assign(se_dim, 0.0);
    BiLstmGradRefs sent_g{lstm_grads("sent_lstm.fwd"), lstm_grads("sent_lstm.bwd")};
    bilstm_backward(sent_lstm_, cache.sent.lstm, d_fwd, d_bwd, sent_g, d_se);

    // --- word-level encoder per sentence ---
    EncoderGradRefs enc_g;
    enc_g.word_lstm = BiLstmGradRefs{lstm_grads("word_lstm.fwd"), lstm_grads("word_lstm.bwd")};
    if (cfg_.pooling == PoolingMode::attention) {
        enc_g.pool_w = &grad_slot(grads, "pool.w", *enc_.pool_w);
        enc_g.pool_b = &grad_slot(grads, "pool.b", *enc_.pool_b);
        enc_g.pool_ctx = &grad_slot(grads, "pool.ctx", *enc_.pool_ctx);
    }
    for (size_t i = 0; i < k; ++i) {
        encoder_backward(enc_, cache.sents[i], d_se[i], enc_g, nullptr);
    }
}

LossBreakdown SegmenterModel::forward_backward(const Document& doc, GradMap& grads) const {
    DocCache cache;
    forward(doc, cache);
    backward(doc, cache, grads);
    return cache.loss;
}

}  // namespace segline
