#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace maximin {

// Dense row-major grid indexed by (subtree, leaf). Small helper shared by
// mean matrices, gap tables and pull-count/ sum accumulators.
template <typename T>
class grid {
  public:
    grid() = default;
    grid(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    explicit grid(const std::vector<std::vector<T>>& nested) {
        rows_ = static_cast<int>(nested.size());
        cols_ = rows_ > 0 ? static_cast<int>(nested.front().size()) : 0;
        data_.reserve(static_cast<std::size_t>(rows_) * cols_);
        for (const auto& row : nested) {
            if (static_cast<int>(row.size()) != cols_)
                throw std::invalid_argument("grid: ragged rows");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    grid(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = static_cast<int>(rows.size());
        cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        data_.reserve(static_cast<std::size_t>(rows_) * cols_);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != cols_)
                throw std::invalid_argument("grid: ragged rows");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    const std::vector<T>& flat() const { return data_; }
    std::vector<T>& flat() { return data_; }

    std::vector<std::vector<T>> nested() const {
        std::vector<std::vector<T>> out(rows_);
        for (int i = 0; i < rows_; ++i)
            out[i].assign(data_.begin() + static_cast<std::size_t>(i) * cols_,
                          data_.begin() + static_cast<std::size_t>(i + 1) * cols_);
        return out;
    }

    bool operator==(const grid& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using matrix = grid<double>;

} // namespace maximin
