#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace segline {

using Vec = std::vector<double>;

bool all_finite(const double* data, size_t n);
inline bool all_finite(const Vec& v) { return all_finite(v.data(), v.size()); }

// Dense row-major float64 array. Rank 1 or 2 in practice (vectors, matrices).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<size_t> shape);

    static Tensor vector(size_t n) { return Tensor({n}); }
    static Tensor matrix(size_t rows, size_t cols) { return Tensor({rows, cols}); }
    static Tensor scalar(double v);
    static Tensor from_vec(const Vec& v);

    const std::vector<size_t>& shape() const { return shape_; }
    size_t ndim() const { return shape_.size(); }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    // 2-D accessors; rank-1 tensors behave as column vectors.
    size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    size_t cols() const { return shape_.size() >= 2 ? shape_[1] : 1; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](size_t i) { return data_[i]; }
    double operator[](size_t i) const { return data_[i]; }
    double& at(size_t r, size_t c) { return data_[r * cols() + c]; }
    double at(size_t r, size_t c) const { return data_[r * cols() + c]; }

    void fill(double v);
    void zero() { fill(0.0); }
    bool all_finite() const { return segline::all_finite(data_.data(), data_.size()); }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

    std::string shape_str() const;

private:
    std::vector<size_t> shape_;
    std::vector<double> data_;
};

}  // namespace segline
