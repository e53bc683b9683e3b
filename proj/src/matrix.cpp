#include "bspeig/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bspeig {

namespace {

void check_block(Index rows, Index cols, Index r0, Index c0, Index nr, Index nc) {
  if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows || c0 + nc > cols) {
    throw ShapeError("block [" + std::to_string(r0) + "+" + std::to_string(nr) + ", " +
                     std::to_string(c0) + "+" + std::to_string(nc) + "] outside " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

ConstMatrixView ConstMatrixView::block(Index r0, Index c0, Index nr, Index nc) const {
  check_block(rows, cols, r0, c0, nr, nc);
  return {data + r0 * ld + c0, nr, nc, ld};
}

MatrixView MatrixView::block(Index r0, Index c0, Index nr, Index nc) const {
  check_block(rows, cols, r0, c0, nr, nc);
  return {data + r0 * ld + c0, nr, nc, ld};
}

Matrix::Matrix(Index rows, Index cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
  data_.assign(static_cast<std::size_t>(rows * cols), fill);
}

Matrix Matrix::identity(Index n) { return eye(n, n); }

Matrix Matrix::eye(Index m, Index n) {
  Matrix e(m, n);
  for (Index i = 0; i < std::min(m, n); ++i) e(i, i) = 1.0;
  return e;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r ? static_cast<Index>(rows.begin()->size()) : 0;
  Matrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != c) throw ShapeError("ragged initializer");
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::copy_of(ConstMatrixView v) {
  Matrix m(v.rows, v.cols);
  copy_into(v, m.view());
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void copy_into(ConstMatrixView src, MatrixView dst) {
  if (src.rows != dst.rows || src.cols != dst.cols) throw ShapeError("copy_into: shape mismatch");
  for (Index i = 0; i < src.rows; ++i) std::copy_n(src.row(i), src.cols, dst.row(i));
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("add: shape mismatch");
  Matrix c = a;
  for (Index i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("subtract: shape mismatch");
  Matrix c = a;
  for (Index i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix scaled(const Matrix& a, double s) {
  Matrix c = a;
  for (double& x : c.values()) x *= s;
  return c;
}

Matrix reference_product(ConstMatrixView a, ConstMatrixView b) {
  if (a.cols != b.rows) throw ShapeError("reference_product: inner dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (Index k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

double frobenius_norm(ConstMatrixView a) {
  double s = 0.0;
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double max_abs(ConstMatrixView a) {
  double m = 0.0;
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double max_abs_diff(ConstMatrixView a, ConstMatrixView b) {
  if (a.rows != b.rows || a.cols != b.cols) throw ShapeError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double tol = rel_tol * std::max(frobenius_norm(a.view()), 1e-300);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

}  // namespace bspeig
