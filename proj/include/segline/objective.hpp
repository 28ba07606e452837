#pragma once

#include <cstdint>
#include <vector>

#include "segline/segmenter.hpp"
#include "segline/tensor.hpp"

namespace segline {

struct LossBreakdown {
    double l1 = 0.0;
    double l2 = 0.0;
    double total = 0.0;
    double alpha = 1.0;
};

// Summed (not averaged) binary cross-entropy over the k-1 predicted
// positions; probabilities are clamped to [eps, 1-eps] inside the logs.
double main_loss(const std::vector<double>& probs, const std::vector<uint8_t>& labels,
                 double clamp_eps = 1e-12);

// Pair embeddings for the coherence task, pair_index in [0, k-2] addressing
// the pair <s_i, s_i+1> (0-based). Out-of-range recurrent states are zero:
//   e_fwd = tanh(W_e (fwd[i]   - fwd[i-1]) + b_e)
//   e_bwd = tanh(W_e (bwd[i+1] - bwd[i+2]) + b_e)
struct PairEmbedding {
    Vec fwd_diff, bwd_diff;  // pre-projection differences
    Vec e_fwd, e_bwd;        // tanh outputs
};

PairEmbedding pair_embeddings(const HiddenStates& states, size_t pair_index, const Tensor& w_e,
                              const Tensor& b_e);

// sigmoid of the cosine similarity; range (sigmoid(-1), sigmoid(1)).
double coherence(const Vec& e_a, const Vec& e_b);

// L2 = -sum_{l=1} log Coh - sum_{l=0} log(1 - Coh), clamped like main_loss.
double aux_loss(const std::vector<double>& cohs, const std::vector<uint8_t>& labels,
                double clamp_eps = 1e-12);

// alpha * L1 + (1 - alpha) * L2; throws NumericError("AlphaOutOfRange").
double total_loss(double l1, double l2, double alpha);

}  // namespace segline
