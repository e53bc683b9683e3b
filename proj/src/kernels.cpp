#include "bspeig/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bspeig/numeric.hpp"
#include "bspeig/simd.hpp"

namespace bspeig {

namespace {

constexpr Index kPanel = 32;

// v^T C over rows of a strided column v (length C.rows).
void column_dot_rows(const double* v, Index vstride, ConstMatrixView c, double* out) {
  const auto& k = simd::active();
  std::fill(out, out + c.cols, 0.0);
  for (Index i = 0; i < c.rows; ++i) k.axpy(v[i * vstride], c.row(i), out, c.cols);
}

// T for reflectors in columns [0, nb) of u (unit lower trapezoidal), taus given.
Matrix build_t(ConstMatrixView u, const std::vector<double>& tau) {
  const Index nb = u.cols;
  Matrix t(nb, nb);
  std::vector<double> y(static_cast<std::size_t>(nb));
  for (Index j = 0; j < nb; ++j) {
    // y_k = u_k^T u_j for k < j; u_j is zero above row j.
    for (Index k = 0; k < j; ++k) {
      double s = 0.0;
      for (Index i = j; i < u.rows; ++i) s += u(i, k) * u(i, j);
      y[static_cast<std::size_t>(k)] = s;
    }
    for (Index r = 0; r < j; ++r) {
      double s = 0.0;
      for (Index k = r; k < j; ++k) s += t(r, k) * y[static_cast<std::size_t>(k)];
      t(r, j) = -tau[static_cast<std::size_t>(j)] * s;
    }
    t(j, j) = tau[static_cast<std::size_t>(j)];
  }
  return t;
}

void check_pivot(double pivot, double scale, Index k) {
  if (!(std::abs(pivot) > 1e3 * kEps * std::max(1.0, scale)))
    throw NumericalError("reconstruction failure: zero pivot at step " + std::to_string(k), std::abs(pivot));
}

LuFactors finish_lu(Matrix m, Matrix l, std::vector<double> signs, const Meter& meter) {
  LuFactors f;
  const Index n = m.rows();
  f.u = Matrix(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) f.u(i, j) = m(i, j);
  f.l = std::move(l);
  f.l_inv = invert_lower_unit(f.l.view(), meter);
  f.u_inv = invert_upper(f.u.view(), meter);
  f.signs = std::move(signs);
  return f;
}

void eliminate_below(Matrix& m, Matrix& l, Index k) {
  const auto& kt = simd::active();
  const Index n = m.rows();
  for (Index i = k + 1; i < n; ++i) {
    const double f = m(i, k) / m(k, k);
    l(i, k) = f;
    m(i, k) = 0.0;
    if (f != 0.0) kt.axpy(-f, m.row(k) + k + 1, m.row(i) + k + 1, n - k - 1);
  }
}

}  // namespace

Matrix local_matmul(ConstMatrixView a, ConstMatrixView b, const Meter& meter) {
  if (a.cols != b.rows) throw ShapeError("local_matmul: inner dimension mismatch");
  Matrix c(a.rows, b.cols);
  local_matmul_acc(a, b, c.view(), 1.0, meter);
  return c;
}

void local_matmul_acc(ConstMatrixView a, ConstMatrixView b, MatrixView c, double alpha, const Meter& meter) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
    throw ShapeError("local_matmul: dimension mismatch");
  simd::active().gemm(a, b, c, alpha);
  meter.matmul(a.rows, a.cols, b.cols);
}

QrResult local_qr(ConstMatrixView a, const Meter& meter) {
  const Index m = a.rows;
  const Index n = a.cols;
  if (m < n) throw ShapeError("local_qr: needs m >= n, got " + std::to_string(m) + "x" + std::to_string(n));
  const auto& kt = simd::active();
  Matrix w = Matrix::copy_of(a);
  Matrix u(m, n);
  std::vector<double> tau(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n));

  for (Index j0 = 0; j0 < n; j0 += kPanel) {
    const Index pe = std::min(n, j0 + kPanel);
    for (Index j = j0; j < pe; ++j) {
      const double alpha = w(j, j);
      double sigma = 0.0;
      for (Index i = j + 1; i < m; ++i) sigma += w(i, j) * w(i, j);
      const double norm = std::sqrt(alpha * alpha + sigma);
      double tj = 2.0;
      double beta = 0.0;
      u(j, j) = 1.0;
      if (norm > 0.0) {
        beta = alpha >= 0.0 ? -norm : norm;
        tj = (beta - alpha) / beta;
        const double scale = 1.0 / (alpha - beta);
        for (Index i = j + 1; i < m; ++i) u(i, j) = w(i, j) * scale;
      }
      tau[static_cast<std::size_t>(j)] = tj;
      w(j, j) = beta;
      for (Index i = j + 1; i < m; ++i) w(i, j) = 0.0;
      // Apply (I - tau v v^T) to the rest of the panel.
      const Index rest = pe - j - 1;
      if (rest > 0) {
        ConstMatrixView trail = w.block(j, j + 1, m - j, rest);
        column_dot_rows(&u(j, j), n, trail, z.data());
        for (Index i = j; i < m; ++i) {
          const double f = -tj * u(i, j);
          if (f != 0.0) kt.axpy(f, z.data(), &w(i, j + 1), rest);
        }
      }
    }
    const Index rest = n - pe;
    if (rest > 0) {
      // W2 <- (I - V T V^T)^T W2 = W2 - V T^T (V^T W2)
      const Index nb = pe - j0;
      ConstMatrixView v = u.block(j0, j0, m - j0, nb);
      std::vector<double> ptau(tau.begin() + j0, tau.begin() + pe);
      Matrix t = build_t(v, ptau);
      MatrixView w2 = w.block(j0, pe, m - j0, rest);
      Matrix vt = Matrix::copy_of(v).transposed();
      Matrix y(nb, rest);
      kt.gemm(vt.view(), w2, y.view(), 1.0);
      Matrix y2(nb, rest);
      kt.gemm(t.transposed().view(), y.view(), y2.view(), 1.0);
      kt.gemm(v, y2.view(), w2, -1.0);
    }
  }

  QrResult res;
  res.r = Matrix(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) res.r(i, j) = w(i, j);
  res.factor.t = build_t(u.view(), tau);
  res.factor.u = std::move(u);
  meter.qr(m, n);
  return res;
}

Matrix explicit_q(const HouseholderFactor& f, const Meter& meter) {
  const Index m = f.u.rows();
  const Index n = f.u.cols();
  Matrix u1t = Matrix::copy_of(f.u.block(0, 0, n, n)).transposed();
  Matrix tm = local_matmul(f.t.view(), u1t.view(), meter);
  Matrix q = Matrix::eye(m, n);
  local_matmul_acc(f.u.view(), tm.view(), q.view(), -1.0, meter);
  return q;
}

void apply_qt(const HouseholderFactor& f, MatrixView c, const Meter& meter) {
  if (c.rows != f.u.rows()) throw ShapeError("apply_qt: row mismatch");
  Matrix ut = f.u.transposed();
  Matrix y = local_matmul(ut.view(), c, meter);
  Matrix y2 = local_matmul(f.t.transposed().view(), y.view(), meter);
  local_matmul_acc(f.u.view(), y2.view(), c, -1.0, meter);
}

LuFactors lu_nopivot_shifted(ConstMatrixView q1, const std::vector<double>& signs, const Meter& meter) {
  const Index n = q1.rows;
  if (q1.cols != n || static_cast<Index>(signs.size()) != n) throw ShapeError("lu_nopivot_shifted: shape mismatch");
  Matrix m = Matrix::copy_of(q1);
  for (Index k = 0; k < n; ++k) m(k, k) -= signs[static_cast<std::size_t>(k)];
  const double scale = max_abs(m.view());
  Matrix l = Matrix::identity(n);
  for (Index k = 0; k < n; ++k) {
    check_pivot(m(k, k), scale, k);
    eliminate_below(m, l, k);
  }
  meter.charge(2 * n * n * n / 3, 0);
  return finish_lu(std::move(m), std::move(l), signs, meter);
}

LuFactors lu_nopivot_adaptive(ConstMatrixView q1, const Meter& meter) {
  const Index n = q1.rows;
  if (q1.cols != n) throw ShapeError("lu_nopivot_adaptive: Q1 must be square");
  Matrix m = Matrix::copy_of(q1);
  Matrix l = Matrix::identity(n);
  std::vector<double> signs(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const double s = m(k, k) >= 0.0 ? -1.0 : 1.0;
    signs[static_cast<std::size_t>(k)] = s;
    m(k, k) -= s;
    check_pivot(m(k, k), 1.0, k);
    eliminate_below(m, l, k);
  }
  meter.charge(2 * n * n * n / 3, 0);
  return finish_lu(std::move(m), std::move(l), std::move(signs), meter);
}

Matrix invert_lower_unit(ConstMatrixView l, const Meter& meter) {
  const Index n = l.rows;
  Matrix x = Matrix::identity(n);
  // Column by column forward substitution.
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (Index k = j; k < i; ++k) s += l(i, k) * x(k, j);
      x(i, j) = -s;
    }
  meter.charge(n * n * n / 3, 0);
  return x;
}

Matrix invert_upper(ConstMatrixView u, const Meter& meter) {
  const Index n = u.rows;
  Matrix x(n, n);
  for (Index j = 0; j < n; ++j) {
    if (u(j, j) == 0.0) throw NumericalError("invert_upper: singular triangular factor");
    x(j, j) = 1.0 / u(j, j);
    for (Index i = j - 1; i >= 0; --i) {
      double s = 0.0;
      for (Index k = i + 1; k <= j; ++k) s += u(i, k) * x(k, j);
      x(i, j) = -s / u(i, i);
    }
  }
  meter.charge(n * n * n / 3, 0);
  return x;
}

double householder_identity_residual(const HouseholderFactor& f) {
  const Index n = f.t.rows();
  Matrix utu = reference_product(f.u.transposed().view(), f.u.view());
  Matrix ti = invert_upper(f.t.view());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) utu(i, j) -= ti(i, j) + ti(j, i);
  return frobenius_norm(utu.view());
}

double orthogonality_residual(ConstMatrixView q) {
  Matrix qt = Matrix::copy_of(q).transposed();
  Matrix g = reference_product(qt.view(), q);
  for (Index i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g.view());
}

}  // namespace bspeig
