#pragma once

#include <functional>
#include <string>
#include <vector>

#include "segline/params.hpp"

namespace segline {

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    size_t checked = 0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;

    bool all_within(double tol) const { return max_rel_err < tol; }
};

// Central-difference check: (f(p+eps) - f(p-eps)) / (2 eps) against the
// analytic gradient left in `params` by grad_fn. Relative error is
// |g - fd| / max(|g|, |fd|, rel_floor); the floor keeps difference noise on
// near-zero entries from dominating. `stride` checks every stride-th element
// of each tensor (1 = all). Throws NumericError("NonDeterministicLoss")
// when two baseline evaluations of loss_fn disagree.
GradCheckReport grad_check(ParamStore& params, const std::function<double()>& loss_fn,
                           const std::function<void()>& grad_fn, double eps,
                           double rel_floor = 1e-3, size_t stride = 1);

}  // namespace segline
