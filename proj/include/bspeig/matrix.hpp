#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "bspeig/errors.hpp"

namespace bspeig {

using Index = std::ptrdiff_t;

// Row-major strided views. Every dense kernel in the repo works on these.
struct ConstMatrixView {
  const double* data = nullptr;
  Index rows = 0;
  Index cols = 0;
  Index ld = 0;

  const double& operator()(Index i, Index j) const { return data[i * ld + j]; }
  const double* row(Index i) const { return data + i * ld; }
  ConstMatrixView block(Index r0, Index c0, Index nr, Index nc) const;
};

struct MatrixView {
  double* data = nullptr;
  Index rows = 0;
  Index cols = 0;
  Index ld = 0;

  double& operator()(Index i, Index j) const { return data[i * ld + j]; }
  double* row(Index i) const { return data + i * ld; }
  MatrixView block(Index r0, Index c0, Index nr, Index nc) const;
  operator ConstMatrixView() const { return {data, rows, cols, ld}; }
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols, double fill = 0.0);
  static Matrix identity(Index n);
  // First n columns of the m x m identity.
  static Matrix eye(Index m, Index n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix copy_of(ConstMatrixView v);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }
  bool empty() const { return size() == 0; }

  double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const double& operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  double* row(Index i) { return data_.data() + i * cols_; }
  const double* row(Index i) const { return data_.data() + i * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  MatrixView view() { return {data_.data(), rows_, cols_, cols_}; }
  ConstMatrixView view() const { return {data_.data(), rows_, cols_, cols_}; }
  MatrixView block(Index r0, Index c0, Index nr, Index nc) { return view().block(r0, c0, nr, nc); }
  ConstMatrixView block(Index r0, Index c0, Index nr, Index nc) const {
    return view().block(r0, c0, nr, nc);
  }

  Matrix transposed() const;
  bool operator==(const Matrix& other) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

void copy_into(ConstMatrixView src, MatrixView dst);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double s);
// Unmetered reference product, used by tests and verification only.
Matrix reference_product(ConstMatrixView a, ConstMatrixView b);

double frobenius_norm(ConstMatrixView a);
double max_abs(ConstMatrixView a);
double max_abs_diff(ConstMatrixView a, ConstMatrixView b);
bool is_symmetric(const Matrix& a, double rel_tol);

}  // namespace bspeig
