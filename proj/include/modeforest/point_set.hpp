#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace modeforest {

/// Immutable n x d sample matrix, row-major. Rows keep their identity:
/// the sample index is the row position and is used for tie-breaking
/// everywhere downstream.
class PointSet {
public:
    PointSet() = default;

    PointSet(std::vector<double> data, std::size_t dim)
        : data_(std::move(data)), dim_(dim) {
        if (dim_ == 0) {
            throw std::invalid_argument("PointSet: dimension must be >= 1");
        }
        if (data_.size() % dim_ != 0) {
            throw std::invalid_argument("PointSet: data length is not a multiple of dimension");
        }
        n_ = data_.size() / dim_;
    }

    /// 1-D convenience constructor.
    static PointSet column(std::vector<double> values) {
        return PointSet(std::move(values), 1);
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return n_ == 0; }

    std::span<const double> operator[](std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const PointSet& other) const {
        return dim_ == other.dim_ && data_ == other.data_;
    }

private:
    std::vector<double> data_;
    std::size_t dim_ = 1;
    std::size_t n_ = 0;
};

/// Thrown when a library invariant that should hold by construction is
/// observed broken. Maps to a distinct exit code in the CLI.
class internal_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace modeforest
