#pragma once

#include <vector>

#include "segline/tensor.hpp"

namespace segline {

// Standard LSTM cell (sigmoid input/forget/output gates, tanh candidate).
// Weights are packed per direction as Wx (4H x D), Wh (4H x H), b (4H) with
// gate order [input, forget, candidate, output].
struct LstmParams {
    const Tensor* wx = nullptr;
    const Tensor* wh = nullptr;
    const Tensor* b = nullptr;

    size_t hidden() const { return b->size() / 4; }
    size_t input() const { return wx->cols(); }
};

struct LstmGradRefs {
    Tensor* wx = nullptr;
    Tensor* wh = nullptr;
    Tensor* b = nullptr;
};

struct LstmStep {
    Vec gates;   // 4H, post-activation [i f g o]
    Vec c;       // cell state
    Vec tanh_c;  // cached tanh(c)
    Vec h;
};

struct LstmSeqCache {
    std::vector<Vec> xs;  // inputs as consumed (copy)
    std::vector<LstmStep> steps;
    size_t size() const { return steps.size(); }
};

// Single step. h_prev/c_prev may be empty for the zero initial state.
// Fills `step` if non-null (needed for the backward pass).
void lstm_cell(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev, Vec& h_out,
               Vec& c_out, LstmStep* step = nullptr);

// Runs the cell over a sequence with zero initial states.
void lstm_forward(const LstmParams& p, const std::vector<Vec>& xs, LstmSeqCache& cache);

// dh[t] is the gradient flowing into h[t] from above. Parameter gradients
// accumulate into `grads`; input gradients accumulate into dxs (sized and
// zeroed by the caller).
void lstm_backward(const LstmParams& p, const LstmSeqCache& cache, const std::vector<Vec>& dh,
                   const LstmGradRefs& grads, std::vector<Vec>& dxs);

// Bidirectional wrapper; the bwd runner consumes the reversed sequence.
struct BiLstmParams {
    LstmParams fwd, bwd;
    size_t hidden() const { return fwd.hidden(); }
};

struct BiLstmGradRefs {
    LstmGradRefs fwd, bwd;
};

struct BiLstmCache {
    LstmSeqCache fwd, bwd;
    size_t len = 0;

    // State of the left-to-right pass at position t.
    const Vec& fwd_state(size_t t) const { return fwd.steps[t].h; }
    // State of the right-to-left pass at position t.
    const Vec& bwd_state(size_t t) const { return bwd.steps[len - 1 - t].h; }
};

void bilstm_forward(const BiLstmParams& p, const std::vector<Vec>& xs, BiLstmCache& cache);

// dfwd[t]/dbwd[t] are gradients w.r.t. fwd_state(t)/bwd_state(t).
void bilstm_backward(const BiLstmParams& p, const BiLstmCache& cache,
                     const std::vector<Vec>& dfwd, const std::vector<Vec>& dbwd,
                     const BiLstmGradRefs& grads, std::vector<Vec>& dxs);

}  // namespace segline
