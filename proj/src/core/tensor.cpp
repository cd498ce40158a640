#include "gpad/core/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "gpad/kern/kernels.hpp"

namespace gpad {

std::int64_t shape_product(const std::vector<std::int64_t>& shape) {
    std::int64_t p = 1;
    for (auto d : shape) {
        if (d <= 0) throw std::invalid_argument("tensor extents must be positive");
        p *= d;
    }
    return p;
}

Tensor::Tensor(std::vector<std::int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<std::size_t>(shape_product(shape_)), 0.0);
}

Tensor::Tensor(std::vector<std::int64_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != static_cast<std::int64_t>(data_.size()))
        throw std::invalid_argument("tensor data length does not match shape");
}

Tensor Tensor::full(std::vector<std::int64_t> shape, double v) {
    Tensor t(std::move(shape));
    t.fill(v);
    return t;
}

double Tensor::item() const {
    if (data_.size() != 1) throw std::logic_error("item() on tensor of size " + std::to_string(data_.size()));
    return data_[0];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const { return kern::all_finite(data_.data(), data_.size()); }

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "x" : "") << shape_[i];
    os << "]";
    return os.str();
}

}  // namespace gpad
