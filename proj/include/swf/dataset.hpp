#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swf/welfare.hpp"

namespace swf {

// Row-major n x d matrix of utilities; one row per action.
class UtilityMatrix {
 public:
  UtilityMatrix() = default;
  UtilityMatrix(std::size_t rows, std::size_t cols, double fill = 1.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  void append_row(std::span<const double> values);

  // Rows listed in `indices`, in that order.
  UtilityMatrix select_rows(std::span<const std::size_t> indices) const;

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const UtilityMatrix&, const UtilityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct IndexPair {
  std::size_t u;
  std::size_t v;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

struct CardinalData {
  UtilityMatrix u;
  std::vector<double> y;
};

// Comparisons reference rows of one utility matrix, so an action shared by
// many pairs is stored and evaluated once.
struct OrdinalData {
  UtilityMatrix u;
  std::vector<IndexPair> pairs;
  std::vector<Label> y;
};

}  // namespace swf
