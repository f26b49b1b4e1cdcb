#include "swf/dataset.hpp"

#include <stdexcept>

namespace swf {

void UtilityMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw std::invalid_argument("row width does not match matrix width");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

UtilityMatrix UtilityMatrix::select_rows(std::span<const std::size_t> indices) const {
  UtilityMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_) throw std::out_of_range("row index out of range");
    const auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

}  // namespace swf
