#include "segline/params.hpp"

#include <cmath>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/rng.hpp"

namespace segline {

Tensor& grad_slot(GradMap& grads, const std::string& name, const Tensor& like) {
    auto it = grads.find(name);
    if (it == grads.end()) {
        it = grads.emplace(name, Tensor(like.shape())).first;
    }
    return it->second;
}

Tensor& ParamStore::create(const std::string& name, std::vector<size_t> shape) {
    if (entries_.count(name)) throw Error("duplicate parameter name: " + name);
    Entry e;
    e.value = Tensor(shape);
    e.grad = Tensor(shape);
    e.m = Tensor(shape);
    e.v = Tensor(shape);
    auto [it, ok] = entries_.emplace(name, std::move(e));
    (void)ok;
    return it->second.value;
}

Tensor& ParamStore::create_uniform(const std::string& name, std::vector<size_t> shape,
                                   uint64_t seed) {
    Tensor& t = create(name, shape);
    const size_t fan_in = t.ndim() >= 2 ? t.cols() : t.size();
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Rng rng(derive_seed(seed, name));
    for (size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
}

ParamStore::Entry& ParamStore::find(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error("unknown parameter: " + name);
    return it->second;
}

const ParamStore::Entry& ParamStore::find(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error("unknown parameter: " + name);
    return it->second;
}

Tensor& ParamStore::value(const std::string& name) { return find(name).value; }
const Tensor& ParamStore::value(const std::string& name) const { return find(name).value; }
Tensor& ParamStore::grad(const std::string& name) { return find(name).grad; }
const Tensor& ParamStore::grad(const std::string& name) const { return find(name).grad; }

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

size_t ParamStore::total_elements() const {
    size_t n = 0;
    for (const auto& [name, entry] : entries_) n += entry.value.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& [name, entry] : entries_) entry.grad.zero();
}

void ParamStore::accumulate(const GradMap& grads, double scale) {
    for (const auto& [name, g] : grads) {
        Tensor& dst = grad(name);
        if (!dst.same_shape(g))
            throw ShapeError("ShapeMismatch: gradient for " + name + " has shape " +
                             g.shape_str() + ", parameter is " + dst.shape_str());
        kernels::ops().axpy(scale, g.data(), dst.data(), dst.size());
    }
}

double ParamStore::grad_norm() const {
    double sq = 0.0;
    for (const auto& [name, entry] : entries_) {
        sq += kernels::ops().dot(entry.grad.data(), entry.grad.data(), entry.grad.size());
    }
    return std::sqrt(sq);
}

void ParamStore::clip_grads(double max_norm) {
    const double norm = grad_norm();
    if (norm > max_norm && norm > 0.0) {
        const double factor = max_norm / norm;
        for (auto& [name, entry] : entries_) {
            kernels::ops().scale(factor, entry.grad.data(), entry.grad.size());
        }
    }
}

void ParamStore::adam_step(const AdamConfig& cfg) {
    ++step_;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
    for (auto& [name, entry] : entries_) {
        kernels::ops().adam_update(entry.value.data(), entry.m.data(), entry.v.data(),
                                   entry.grad.data(), entry.value.size(), cfg.lr, cfg.beta1,
                                   cfg.beta2, cfg.eps, bias1, bias2);
    }
}

std::map<std::string, Tensor> ParamStore::snapshot_values() const {
    std::map<std::string, Tensor> out;
    for (const auto& [name, entry] : entries_) out.emplace(name, entry.value);
    return out;
}

void ParamStore::load_values(const std::map<std::string, Tensor>& values) {
    if (values.size() != entries_.size())
        throw DataError("checkpoint/dimension mismatch: expected " +
                        std::to_string(entries_.size()) + " tensors, got " +
                        std::to_string(values.size()));
    for (auto& [name, entry] : entries_) {
        auto it = values.find(name);
        if (it == values.end())
            throw DataError("checkpoint/dimension mismatch: missing tensor " + name);
        if (!entry.value.same_shape(it->second))
            throw DataError("checkpoint/dimension mismatch: tensor " + name + " has shape " +
                            it->second.shape_str() + ", model expects " +
                            entry.value.shape_str());
        entry.value = it->second;
    }
}

}  // namespace segline
