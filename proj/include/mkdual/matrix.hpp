#pragma once

#include <cstddef>
#include <vector>

#include "mkdual/errors.hpp"

namespace mkdual {

/// Dense row-major matrix. Value type; no expression templates.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const S& fill = S(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<S>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw DimensionMismatch("ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  /// Flat row-major access; cell (i, j) has index i * cols() + j.
  S& flat(std::size_t k) { return data_[k]; }
  const S& flat(std::size_t k) const { return data_[k]; }

  Matrix operator-() const {
    Matrix out(*this);
    for (auto& v : out.data_) v = -v;
    return out;
  }

  std::vector<S> row_sums() const {
    std::vector<S> out(rows_, S(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j);
    return out;
  }

  std::vector<S> col_sums() const {
    std::vector<S> out(cols_, S(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[j] += (*this)(i, j);
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

}  // namespace mkdual
