#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace seal {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. Everything in this project runs at desk
// scale (N below a few hundred), so a plain contiguous buffer is all we need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {
    assert(rows >= 0 && cols >= 0);
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<Vec>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i) {
      assert(static_cast<int>(rows[i].size()) == m.cols());
      for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[static_cast<size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_[static_cast<size_t>(i) * cols_ + j];
  }

  // y = A x
  Vec multiply(const Vec& x) const {
    assert(static_cast<int>(x.size()) == cols_);
    Vec y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      double acc = 0.0;
      const double* row = &data_[static_cast<size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  // y = A^T x
  Vec multiply_transposed(const Vec& x) const {
    assert(static_cast<int>(x.size()) == rows_);
    Vec y(cols_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      const double* row = &data_[static_cast<size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) y[j] += row[j] * x[i];
    }
    return y;
  }

  std::vector<Vec> to_rows() const {
    std::vector<Vec> out(rows_, Vec(cols_));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
    return out;
  }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace seal
