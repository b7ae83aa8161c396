#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ttrnn/errors.hpp"

namespace ttrnn {

using index_t = std::int64_t;

/// Extents of a dense multi-dimensional array. Every extent is >= 1 and the
/// total size is checked against index_t overflow on construction.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<index_t> dims);

    std::size_t rank() const { return dims_.size(); }
    index_t extent(std::size_t k) const { return dims_[k]; }
    index_t size() const { return size_; }
    const std::vector<index_t>& dims() const { return dims_; }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }

private:
    std::vector<index_t> dims_;
    index_t size_ = 1;
};

/// Dense 64-bit float tensor, row-major (last index fastest).
struct DenseTensor {
    Shape shape;
    std::vector<double> data;

    DenseTensor() = default;
    explicit DenseTensor(Shape s) : shape(std::move(s)), data(static_cast<std::size_t>(shape.size()), 0.0) {}
    DenseTensor(Shape s, std::vector<double> values);

    static DenseTensor zeros(Shape s) { return DenseTensor(std::move(s)); }

    index_t size() const { return shape.size(); }
    double& operator[](index_t flat) { return data[static_cast<std::size_t>(flat)]; }
    double operator[](index_t flat) const { return data[static_cast<std::size_t>(flat)]; }

    double& at(std::span<const index_t> indices);
    double at(std::span<const index_t> indices) const;
};

/// Row-major linearization of a multi-index. Throws IndexError if any index
/// is out of bounds or the index count does not match the rank.
index_t multi_to_flat(std::span<const index_t> indices, const Shape& shape);

/// Inverse of multi_to_flat. Throws IndexError if flat >= shape.size().
std::vector<index_t> flat_to_multi(index_t flat, const Shape& shape);

/// Splits a combined index l of extent m*n into (i, j) with i = floor(l/n),
/// j = l - n*i, so l = i*n + j. Throws ArgumentError when n == 0.
std::pair<index_t, index_t> split_index(index_t l, index_t n);

/// Replaces the shape metadata; the flat buffer is untouched. Throws
/// ShapeError when the total size differs.
DenseTensor reshape(const DenseTensor& t, Shape new_shape);

} // namespace ttrnn
