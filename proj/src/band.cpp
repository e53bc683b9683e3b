#include "bspeig/band.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bspeig/numeric.hpp"
#include "bspeig/simd.hpp"

namespace bspeig {

BandMatrix::BandMatrix(Index n, Index b) : n_(n), b_(b) {
  if (n < 0 || b < 0) throw ShapeError("band matrix: negative size");
  b_ = std::min(b, std::max<Index>(n - 1, 0));
  d_ = Matrix(b_ + 1, n);
}

BandMatrix BandMatrix::from_dense(const Matrix& a, Index b) {
  if (a.rows() != a.cols()) throw ShapeError("band matrix: dense input must be square");
  BandMatrix m(a.rows(), b);
  for (Index d = 0; d <= m.b_; ++d)
    for (Index j = 0; j + d < m.n_; ++j) m.d_(d, j) = a(j + d, j);
  return m;
}

double BandMatrix::get(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  if (i - j > b_) return 0.0;
  return d_(i - j, j);
}

void BandMatrix::set(Index i, Index j, double v) {
  if (i < j) std::swap(i, j);
  if (i - j > b_) throw ShapeError("band matrix: entry outside the band");
  d_(i - j, j) = v;
}

Matrix BandMatrix::to_dense() const {
  Matrix a(n_, n_);
  for (Index d = 0; d <= b_; ++d)
    for (Index j = 0; j + d < n_; ++j) {
      a(j + d, j) = d_(d, j);
      a(j, j + d) = d_(d, j);
    }
  return a;
}

double BandMatrix::out_of_band(const Matrix& a, Index b) {
  double m = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (std::abs(i - j) > b) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double BandMatrix::frobenius() const {
  double s = 0.0;
  for (Index d = 0; d <= b_; ++d)
    for (Index j = 0; j + d < n_; ++j) s += (d ? 2.0 : 1.0) * d_(d, j) * d_(d, j);
  return std::sqrt(s);
}

Tridiagonal band_to_tridiagonal_seq(const BandMatrix& band, const Meter& meter) {
  const Index n = band.n();
  Tridiagonal out;
  out.diag.resize(static_cast<std::size_t>(n));
  out.offdiag.resize(static_cast<std::size_t>(std::max<Index>(n - 1, 0)));
  if (band.bandwidth() <= 1) {
    for (Index i = 0; i < n; ++i) out.diag[static_cast<std::size_t>(i)] = band.get(i, i);
    for (Index i = 0; i + 1 < n; ++i) out.offdiag[static_cast<std::size_t>(i)] = band.get(i + 1, i);
    return out;
  }

  const auto& kt = simd::active();
  Matrix a = band.to_dense();
  std::int64_t flops = 0;
  for (Index k = band.bandwidth(); k >= 2; --k) {
    for (Index j = 0; j + k < n; ++j) {
      Index col = j;
      Index i = j + k;
      while (i < n) {
        const double x = a(i - 1, col);
        const double y = a(i, col);
        if (y == 0.0) break;
        const double r = std::hypot(x, y);
        const double c = x / r;
        const double s = y / r;
        const Index lo = std::max<Index>(0, i - k - 2);
        const Index hi = std::min(n, i + k + 2);
        kt.rot(a.row(i - 1) + lo, a.row(i) + lo, hi - lo, c, s);
        for (Index t = lo; t < hi; ++t) {
          const double u = a(t, i - 1);
          const double v = a(t, i);
          a(t, i - 1) = c * u + s * v;
          a(t, i) = c * v - s * u;
        }
        a(i, col) = 0.0;
        a(col, i) = 0.0;
        flops += 12 * (hi - lo);
        col = i - 1;
        i += k;
      }
    }
  }
  meter.charge(flops, 0);
  for (Index i = 0; i < n; ++i) out.diag[static_cast<std::size_t>(i)] = a(i, i);
  for (Index i = 0; i + 1 < n; ++i) out.offdiag[static_cast<std::size_t>(i)] = a(i + 1, i);
  return out;
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e, const Meter& meter) {
  const auto n = static_cast<Index>(d.size());
  if (n == 0) return d;
  if (static_cast<Index>(e.size()) != n - 1) throw ShapeError("tridiagonal: offdiag must have n-1 entries");
  e.push_back(0.0);
  const Index cap = 30 * n;
  Index iterations = 0;
  std::int64_t flops = 0;
  for (Index l = 0; l < n; ++l) {
    Index m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[static_cast<std::size_t>(m)]) + std::abs(d[static_cast<std::size_t>(m + 1)]);
        if (std::abs(e[static_cast<std::size_t>(m)]) <= kEps * dd) break;
      }
      if (m == l) break;
      if (++iterations > cap)
        throw NumericalError("tridiagonal QR: no convergence after " + std::to_string(cap) + " iterations");
      auto D = [&](Index i) -> double& { return d[static_cast<std::size_t>(i)]; };
      auto E = [&](Index i) -> double& { return e[static_cast<std::size_t>(i)]; };
      // Wilkinson shift from the leading 2x2 block.
      double g = (D(l + 1) - D(l)) / (2.0 * E(l));
      double r = std::hypot(g, 1.0);
      g = D(m) - D(l) + E(l) / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      Index i = m - 1;
      bool deflated = false;
      for (; i >= l; --i) {
        const double f = s * E(i);
        const double b = c * E(i);
        r = std::hypot(f, g);
        E(i + 1) = r;
        if (r == 0.0) {
          D(i + 1) -= p;
          E(m) = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = D(i + 1) - p;
        r = (D(i) - g) * s + 2.0 * c * b;
        p = s * r;
        D(i + 1) = g + p;
        g = c * r - b;
        flops += 20;
      }
      if (deflated) continue;
      D(l) -= p;
      E(l) = g;
      E(m) = 0.0;
    } while (m != l);
  }
  meter.charge(flops, 0);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace bspeig
