#include "segline/objective.hpp"

#include <algorithm>
#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/ops.hpp"

namespace segline {

namespace {

double clamp01(double p, double eps) { return std::min(1.0 - eps, std::max(eps, p)); }

}  // namespace

double main_loss(const std::vector<double>& probs, const std::vector<uint8_t>& labels,
                 double clamp_eps) {
    if (probs.size() != labels.size())
        throw ShapeError("LengthMismatch: " + std::to_string(probs.size()) + " probs vs " +
                         std::to_string(labels.size()) + " labels");
    double loss = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        const double p = clamp01(probs[i], clamp_eps);
        loss -= labels[i] ? std::log(p) : std::log(1.0 - p);
    }
    return loss;
}

PairEmbedding pair_embeddings(const HiddenStates& states, size_t pair_index, const Tensor& w_e,
                              const Tensor& b_e) {
    const size_t k = states.size();
    if (k < 2 || pair_index + 1 >= k)
        throw ShapeError("IndexOutOfRange: pair " + std::to_string(pair_index) + " in document of " +
                         std::to_string(k) + " sentences");
    const size_t h = states.fwd[0].size();

    PairEmbedding pe;
    pe.fwd_diff = states.fwd[pair_index];
    if (pair_index > 0) {
        kernels::ops().axpy(-1.0, states.fwd[pair_index - 1].data(), pe.fwd_diff.data(), h);
    }
    pe.bwd_diff = states.bwd[pair_index + 1];
    if (pair_index + 2 < k) {
        kernels::ops().axpy(-1.0, states.bwd[pair_index + 2].data(), pe.bwd_diff.data(), h);
    }
    const Vec bias(b_e.data(), b_e.data() + b_e.size());
    pe.e_fwd = tanh_vec(affine(w_e, pe.fwd_diff, bias));
    pe.e_bwd = tanh_vec(affine(w_e, pe.bwd_diff, bias));
    return pe;
}

double coherence(const Vec& e_a, const Vec& e_b) { return sigmoid(cosine(e_a, e_b)); }

double aux_loss(const std::vector<double>& cohs, const std::vector<uint8_t>& labels,
                double clamp_eps) {
    if (cohs.size() != labels.size())
        throw ShapeError("LengthMismatch: " + std::to_string(cohs.size()) + " coherences vs " +
                         std::to_string(labels.size()) + " labels");
    double loss = 0.0;
    for (size_t i = 0; i < cohs.size(); ++i) {
        const double c = clamp01(cohs[i], clamp_eps);
        loss -= labels[i] ? std::log(c) : std::log(1.0 - c);
    }
    return loss;
}

double total_loss(double l1, double l2, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw NumericError("AlphaOutOfRange: " + std::to_string(alpha));
    return alpha * l1 + (1.0 - alpha) * l2;
}

}  // namespace segline
