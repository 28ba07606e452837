#include "segline/tensor.hpp"

#include <cmath>
#include <sstream>

#include "segline/error.hpp"

namespace segline {

bool all_finite(const double* data, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data[i])) return false;
    }
    return true;
}

Tensor::Tensor(std::vector<size_t> shape) : shape_(std::move(shape)) {
    size_t total = 1;
    for (size_t d : shape_) {
        if (d == 0) throw ShapeError("Tensor dimensions must be positive");
        total *= d;
    }
    if (shape_.empty()) total = 0;
    data_.assign(total, 0.0);
}

Tensor Tensor::scalar(double v) {
    Tensor t({1});
    t.data_[0] = v;
    return t;
}

Tensor Tensor::from_vec(const Vec& v) {
    if (v.empty()) return Tensor();
    Tensor t({v.size()});
    t.data_ = v;
    return t;
}

void Tensor::fill(double v) {
    for (double& x : data_) x = v;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << ")";
    return os.str();
}

}  // namespace segline
