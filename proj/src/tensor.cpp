#include "ttrnn/tensor.hpp"

#include <string>

namespace ttrnn {

namespace {

std::string dims_to_string(const std::vector<index_t>& dims) {
    std::string s = "(";
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k > 0) s += ",";
        s += std::to_string(dims[k]);
    }
    s += ")";
    return s;
}

} // namespace

Shape::Shape(std::vector<index_t> dims) : dims_(std::move(dims)) {
    size_ = 1;
    for (index_t d : dims_) {
        if (d < 1) {
            throw ShapeError("shape extent must be >= 1, got " + std::to_string(d) + " in " + dims_to_string(dims_));
        }
        if (__builtin_mul_overflow(size_, d, &size_)) {
            throw ShapeError("shape size overflows index type: " + dims_to_string(dims_));
        }
    }
}

DenseTensor::DenseTensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (static_cast<index_t>(data.size()) != shape.size()) {
        throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape size " +
                         std::to_string(shape.size()));
    }
}

double& DenseTensor::at(std::span<const index_t> indices) {
    return data[static_cast<std::size_t>(multi_to_flat(indices, shape))];
}

double DenseTensor::at(std::span<const index_t> indices) const {
    return data[static_cast<std::size_t>(multi_to_flat(indices, shape))];
}

index_t multi_to_flat(std::span<const index_t> indices, const Shape& shape) {
    if (indices.size() != shape.rank()) {
        throw IndexError("expected " + std::to_string(shape.rank()) + " indices, got " +
                         std::to_string(indices.size()));
    }
    index_t flat = 0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        index_t i = indices[k];
        if (i < 0 || i >= shape.extent(k)) {
            throw IndexError("index " + std::to_string(i) + " out of range [0 ," +
                             std::to_string(shape.extent(k)) + ") in dimension " + std::to_string(k));
        }
        flat = flat * shape.extent(k) + i;
    }
    return flat;
}

std::vector<index_t> flat_to_multi(index_t flat, const Shape& shape) {
    if (flat < 0 || flat >= shape.size()) {
        throw IndexError("flat index " + std::to_string(flat) + " out of range [0, " +
                         std::to_string(shape.size()) + ")");
    }
    std::vector<index_t> indices(shape.rank());
    for (std::size_t k = shape.rank(); k-- > 0;) {
        indices[k] = flat % shape.extent(k);
        flat /= shape.extent(k);
    }
    return indices;
}

std::pair<index_t, index_t> split_index(index_t l, index_t n) {
    if (n <= 0) {
        throw ArgumentError("split extent must be positive, got " + std::to_string(n));
    }
    if (l < 0) {
        throw IndexError("split index must be non-negative, got " + std::to_string(l));
    }
    const index_t i = l / n;
    return {i, l - n * i};
}

DenseTensor reshape(const DenseTensor& t, Shape new_shape) {
    if (new_shape.size() != t.shape.size()) {
        throw ShapeError("cannot reshape size " + std::to_string(t.shape.size()) + " to size " +
                         std::to_string(new_shape.size()));
    }
    DenseTensor out;
    out.shape = std::move(new_shape);
    out.data = t.data;
    return out;
}

} // namespace ttrnn
