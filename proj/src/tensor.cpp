#include "wmr/tensor.hpp"

#include <cmath>
#include <sstream>

#include "wmr/error.hpp"

namespace wmr {

std::size_t shape_product(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int e : shape) {
        if (e <= 0) throw ConfigError("tensor extents must be positive");
        n *= static_cast<std::size_t>(e);
    }
    return n;
}

Tensor::Tensor(std::vector<int> shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values) : shape_(std::move(shape)) {
    if (shape_product(shape_) != values.size()) {
        throw ConfigError("tensor data length does not match shape " + shape_string());
    }
    data_ = std::move(values);
}

Tensor Tensor::vector(std::initializer_list<double> values) {
    return Tensor({static_cast<int>(values.size())}, std::vector<double>(values));
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double value) {
    for (double& v : data_) v = value;
}

Tensor Tensor::reshaped(std::vector<int> new_shape) const {
    if (shape_product(new_shape) != data_.size()) {
        throw ConfigError("reshape changes element count");
    }
    Tensor out;
    out.shape_ = std::move(new_shape);
    out.data_ = data_;
    return out;
}

std::string Tensor::shape_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << 'x';
        os << shape_[i];
    }
    os << ']';
    return os.str();
}

void require_finite(const Tensor& t, const std::string& what) {
    if (!t.all_finite()) throw NumericError(what + " contains non-finite values");
}

}  // namespace wmr
