#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "segline/tensor.hpp"

namespace segline {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Gradients computed for one document; merged into the store serially.
using GradMap = std::map<std::string, Tensor>;

Tensor& grad_slot(GradMap& grads, const std::string& name, const Tensor& like);

// Named parameter tensors plus per-parameter Adam state. Iteration order is
// the map's lexicographic name order, which keeps every reduction over
// parameters deterministic.
class ParamStore {
public:
    struct Entry {
        Tensor value;
        Tensor grad;
        Tensor m;  // first moment
        Tensor v;  // second moment
    };

    // Zero-initialized parameter.
    Tensor& create(const std::string& name, std::vector<size_t> shape);

    // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] where fan_in is the
    // column count for matrices and the length for vectors. The stream is
    // keyed by (seed, name) so unrelated parameters never perturb each other.
    Tensor& create_uniform(const std::string& name, std::vector<size_t> shape, uint64_t seed);

    bool has(const std::string& name) const { return entries_.count(name) != 0; }
    Tensor& value(const std::string& name);
    const Tensor& value(const std::string& name) const;
    Tensor& grad(const std::string& name);
    const Tensor& grad(const std::string& name) const;

    std::vector<std::string> names() const;
    size_t size() const { return entries_.size(); }
    size_t total_elements() const;

    void zero_grads();
    void accumulate(const GradMap& grads, double scale);
    double grad_norm() const;
    void clip_grads(double max_norm);

    // One optimizer step over every parameter; increments the step counter.
    void adam_step(const AdamConfig& cfg);
    int64_t step() const { return step_; }

    std::map<std::string, Tensor> snapshot_values() const;
    void load_values(const std::map<std::string, Tensor>& values);

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    Entry& find(const std::string& name);
    const Entry& find(const std::string& name) const;

    std::map<std::string, Entry> entries_;
    int64_t step_ = 0;
};

}  // namespace segline
