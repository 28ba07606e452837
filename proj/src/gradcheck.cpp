#include "segline/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "segline/error.hpp"

namespace segline {

GradCheckReport grad_check(ParamStore& params, const std::function<double()>& loss_fn,
                           const std::function<void()>& grad_fn, double eps, double rel_floor,
                           size_t stride) {
    if (eps < 1e-7 || eps > 1e-3)
        throw NumericError("grad_check eps must lie in [1e-7, 1e-3]");
    if (stride == 0) stride = 1;

    const double f0 = loss_fn();
    const double f1 = loss_fn();
    if (f0 != f1)
        throw NumericError("NonDeterministicLoss: two evaluations differ (" +
                           std::to_string(f0) + " vs " + std::to_string(f1) + ")");
    if (!std::isfinite(f0)) throw NumericError("grad_check: loss is not finite");

    grad_fn();
    GradMap analytic;
    for (const auto& name : params.names()) analytic.emplace(name, params.grad(name));

    GradCheckReport report;
    for (const auto& name : params.names()) {
        Tensor& value = params.value(name);
        const Tensor& g = analytic.at(name);
        GradCheckEntry entry;
        entry.name = name;
        for (size_t i = 0; i < value.size(); i += stride) {
            const double saved = value[i];
            value[i] = saved + eps;
            const double fp = loss_fn();
            value[i] = saved - eps;
            const double fm = loss_fn();
            value[i] = saved;
            const double fd = (fp - fm) / (2.0 * eps);
            const double rel =
                std::abs(g[i] - fd) / std::max({std::abs(g[i]), std::abs(fd), rel_floor});
            ++entry.checked;
            if (rel > entry.max_rel_err) {
                entry.max_rel_err = rel;
                entry.worst_index = i;
                entry.analytic = g[i];
                entry.numeric = fd;
            }
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace segline
