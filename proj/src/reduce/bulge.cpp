#include "bspeig/reduce/bulge.hpp"

#include <algorithm>

#include "bspeig/errors.hpp"
#include "bspeig/kernels.hpp"

namespace bspeig::reduce {

namespace {

void check_shape(Index n, Index b, Index k) {
  if (n < 1 || b < 1 || k < 1) throw InvalidArgument("bulge: n, b and k must be positive");
  if (b % k != 0) throw InvalidArgument("bulge: b mod k must be 0");
}

Matrix transpose_of(ConstMatrixView a) {
  Matrix t(a.cols, a.rows);
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

}  // namespace

BulgeIndexSet bulge_indices(Index n, Index b, Index k, int i, int j) {
  check_shape(n, b, k);
  if (i < 1 || j < 1) throw InvalidArgument("bulge: i and j count from 1");
  BulgeIndexSet s;
  s.i = i;
  s.j = j;
  s.h = b / k;
  s.o_blg = (i - 1) * s.h + (j - 1) * b;
  s.o_qr_r = s.o_blg + s.h;
  if (j == 1) {
    s.o_qr_c = s.o_qr_r - s.h;
    s.o_v = 0;
  } else {
    s.o_qr_c = s.o_qr_r - b;
    s.o_v = b - s.h;
  }
  s.o_up_c = s.o_qr_c + s.h;
  if (s.o_qr_r >= n) throw InvalidArgument("bulge: chase lies outside the matrix");
  s.n_r = std::min(n - s.o_qr_r, b);
  s.n_c = std::min(n - s.o_up_c, s.h + 3 * b);
  return s;
}

int chases_in_sweep(Index n, Index b, Index k, int i) {
  check_shape(n, b, k);
  const Index rest = n - i * (b / k) - 1;
  if (rest <= 0) return 0;
  return static_cast<int>((rest + b - 1) / b);
}

Index bulge_capacity(Index b, Index k) { return 3 * b + b / k; }

std::vector<std::vector<Chase>> chase_phases(Index n, Index b, Index k) {
  check_shape(n, b, k);
  const Index h = b / k;
  std::vector<std::vector<Chase>> phases;
  for (int i = 1; i <= n / h - 1; ++i) {
    const int count = chases_in_sweep(n, b, k, i);
    for (int j = 1; j <= count; ++j) {
      const auto tau = static_cast<std::size_t>(3 * (i - 1) + j - 1);
      if (phases.size() <= tau) phases.resize(tau + 1);
      phases[tau].push_back({i, j});
    }
  }
  std::erase_if(phases, [](const auto& ph) { return ph.empty(); });
  return phases;
}

void chase_local(MatrixView p, MatrixView x, Index o_v, const Meter& meter) {
  const Index nr = p.rows, h = p.cols;
  if (nr < h) throw ShapeError("chase: QR block must not be wide");
  if (x.cols != nr || o_v < 0 || o_v + nr > x.rows) throw ShapeError("chase: update block mismatch");
  const QrResult f = local_qr(p, meter);
  for (Index r = 0; r < nr; ++r)
    for (Index c = 0; c < h; ++c) p(r, c) = r <= c ? f.r(r, c) : 0.0;

  const Matrix& u = f.factor.u;
  const Matrix& t = f.factor.t;
  const Matrix ut = transpose_of(u.view());
  // V = -X U T
  Matrix v = local_matmul(local_matmul(x, u.view(), meter).view(), t.view(), meter);
  for (double& e : v.values()) e = -e;
  // V_v += 1/2 U T^T U^T W_v, with W_v = -V_v
  MatrixView vv = v.block(o_v, 0, nr, h);
  const Matrix y = local_matmul(ut.view(), vv, meter);
  const Matrix z = local_matmul(transpose_of(t.view()).view(), y.view(), meter);
  local_matmul_acc(u.view(), z.view(), vv, -0.5, meter);
  // X += V U^T, then the reflected rows get U V_v^T as well.
  local_matmul_acc(v.view(), ut.view(), x, 1.0, meter);
  const Matrix vvt = transpose_of(vv);
  local_matmul_acc(u.view(), vvt.view(), x.block(o_v, 0, nr, nr), 1.0, meter);
}

void band_to_band_dense(Matrix& a, Index b, Index k, const Meter& meter) {
  const Index n = a.rows();
  if (a.cols() != n) throw ShapeError("band_to_band_dense: matrix must be square");
  check_shape(n, b, k);
  const Index h = b / k;
  for (int i = 1; i <= n / h - 1; ++i) {
    const int count = chases_in_sweep(n, b, k, i);
    for (int j = 1; j <= count; ++j) {
      const BulgeIndexSet s = bulge_indices(n, b, k, i, j);
      Matrix p = Matrix::copy_of(a.block(s.o_qr_r, s.o_qr_c, s.n_r, h));
      Matrix x = Matrix::copy_of(a.block(s.o_up_c, s.o_qr_r, s.n_c, s.n_r));
      chase_local(p.view(), x.view(), s.o_v, meter);
      for (Index r = 0; r < s.n_r; ++r)
        for (Index c = 0; c < h; ++c) a(s.o_qr_r + r, s.o_qr_c + c) = a(s.o_qr_c + c, s.o_qr_r + r) = p(r, c);
      for (Index r = 0; r < s.n_c; ++r)
        for (Index c = 0; c < s.n_r; ++c) a(s.o_up_c + r, s.o_qr_r + c) = a(s.o_qr_r + c, s.o_up_c + r) = x(r, c);
    }
  }
}

}  // namespace bspeig::reduce
