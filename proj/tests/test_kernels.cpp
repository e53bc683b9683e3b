#include <doctest.h>

#include <cmath>

#include "bspeig/band.hpp"
#include "bspeig/bsp/engine.hpp"
#include "bspeig/kernels.hpp"
#include "bspeig/numeric.hpp"
#include "support.hpp"

using namespace bspeig;

namespace {

double qr_residual(const Matrix& a, const QrResult& qr) {
  Matrix q = explicit_q(qr.factor);
  Matrix qr_prod = reference_product(q.view(), qr.r.view());
  return frobenius_norm(subtract(a, qr_prod).view());
}

}  // namespace

TEST_CASE("local_matmul examples") {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(local_matmul(Matrix::identity(2).view(), a.view()) == a);
  CHECK(local_matmul(a.view(), Matrix(2, 2).view()) == Matrix(2, 2));
  CHECK(local_matmul(a.view(), Matrix::from_rows({{5, 6}, {7, 8}}).view()) == Matrix::from_rows({{19, 22}, {43, 50}}));
  CHECK_THROWS_AS(local_matmul(a.view(), Matrix(3, 1).view()), ShapeError);
}

TEST_CASE("local_qr examples") {
  QrResult id = local_qr(Matrix::identity(3).view());
  for (int i = 0; i < 3; ++i) CHECK(std::abs(id.r(i, i)) == doctest::Approx(1.0));
  CHECK(orthogonality_residual(explicit_q(id.factor).view()) < 1e-14);

  QrResult v = local_qr(Matrix::from_rows({{3}, {4}}).view());
  CHECK(std::abs(v.r(0, 0)) == doctest::Approx(5.0));

  QrResult d = local_qr(Matrix::from_rows({{2, 0}, {0, 3}}).view());
  CHECK(std::abs(d.r(0, 0)) == doctest::Approx(2.0));
  CHECK(std::abs(d.r(1, 1)) == doctest::Approx(3.0));

  CHECK_THROWS_AS(local_qr(Matrix(2, 3).view()), ShapeError);
}

TEST_CASE("local_qr contracts across aspect ratios") {
  for (Index ratio : {1, 2, 8, 64}) {
    for (Index n : {1, 5, 40}) {
      const Index m = ratio * n;
      const Matrix a = testing::random_matrix(m, n, static_cast<std::uint64_t>(m * 31 + n));
      const QrResult qr = local_qr(a.view());
      CAPTURE(m);
      CAPTURE(n);
      const double scale = frobenius_norm(a.view());
      CHECK(qr_residual(a, qr) <= 1e3 * kEps * std::sqrt(static_cast<double>(m * n)) * scale);
      CHECK(orthogonality_residual(explicit_q(qr.factor).view()) <= 1e3 * kEps * static_cast<double>(n));
      CHECK(householder_identity_residual(qr.factor) <= 1e3 * kEps * static_cast<double>(n));
      for (Index i = 0; i < n; ++i) {
        CHECK(qr.factor.u(i, i) == 1.0);
        for (Index j = i + 1; j < n; ++j) {
          CHECK(qr.factor.u(i, j) == 0.0);
          CHECK(qr.r(j, i) == 0.0);
        }
        CHECK(qr.factor.t(i, i) >= 1.0);
        CHECK(qr.factor.t(i, i) <= 2.0);
      }
    }
  }
}

TEST_CASE("apply_qt matches explicit product") {
  const Matrix a = testing::random_matrix(12, 4, 77);
  const QrResult qr = local_qr(a.view());
  Matrix c = a;
  apply_qt(qr.factor, c.view());
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(c(i, j) == doctest::Approx(qr.r(i, j)).epsilon(1e-12).scale(1.0));
  for (Index i = 4; i < 12; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(std::abs(c(i, j)) < 1e-13);
}

TEST_CASE("local_qr metering") {
  bsp::MachineParams mp;
  mp.cache_words = 10;
  bsp::Engine e(mp);
  local_qr(testing::random_matrix(8, 4, 1).view(), Meter(e, 0));
  e.settle();
  CHECK(e.ledger().F() == 2 * 8 * 16);
  CHECK(e.ledger().Q() == 32);
}

TEST_CASE("lu_nopivot_shifted") {
  LuFactors f = lu_nopivot_shifted(Matrix::identity(3).view(), {-1, -1, -1});
  CHECK(f.l == Matrix::identity(3));
  CHECK(f.u == scaled(Matrix::identity(3), 2.0));

  CHECK_THROWS_AS(lu_nopivot_shifted(Matrix::from_rows({{0, 1}, {1, 0}}).view(), {-1, -1}), NumericalError);

  const QrResult qr = local_qr(testing::random_matrix(4, 4, 9).view());
  const Matrix q = explicit_q(qr.factor);
  std::vector<double> s(4);
  for (Index i = 0; i < 4; ++i) s[static_cast<std::size_t>(i)] = q(i, i) >= 0.0 ? -1.0 : 1.0;
  LuFactors g = lu_nopivot_shifted(q.view(), s);
  Matrix shifted = q;
  for (Index i = 0; i < 4; ++i) shifted(i, i) -= s[static_cast<std::size_t>(i)];
  const Matrix lu = reference_product(g.l.view(), g.u.view());
  CHECK(frobenius_norm(subtract(lu, shifted).view()) <= 1e3 * kEps * frobenius_norm(shifted.view()));
  CHECK(max_abs_diff(reference_product(g.l.view(), g.l_inv.view()).view(), Matrix::identity(4).view()) < 1e-12);
  CHECK(max_abs_diff(reference_product(g.u.view(), g.u_inv.view()).view(), Matrix::identity(4).view()) < 1e-12);
}

TEST_CASE("adaptive LU keeps pivots at least one") {
  const QrResult qr = local_qr(testing::random_matrix(6, 6, 4).view());
  LuFactors f = lu_nopivot_adaptive(explicit_q(qr.factor).view());
  for (Index i = 0; i < 6; ++i) CHECK(std::abs(f.u(i, i)) >= 1.0 - 1e-12);
}

TEST_CASE("band storage") {
  const Matrix a = testing::random_banded(9, 3, 5);
  const BandMatrix b = BandMatrix::from_dense(a, 3);
  CHECK(b.to_dense() == a);
  CHECK(BandMatrix::out_of_band(a, 3) == 0.0);
  CHECK(BandMatrix::out_of_band(a, 2) > 0.0);
  CHECK(b.get(0, 8) == 0.0);
  CHECK(b.get(4, 2) == a(4, 2));
}

TEST_CASE("band_to_tridiagonal_seq") {
  SUBCASE("b = 1 is unchanged") {
    const Matrix a = testing::random_banded(6, 1, 3);
    const Tridiagonal t = band_to_tridiagonal_seq(BandMatrix::from_dense(a, 1));
    for (Index i = 0; i < 6; ++i) CHECK(t.diag[static_cast<std::size_t>(i)] == a(i, i));
    for (Index i = 0; i < 5; ++i) CHECK(t.offdiag[static_cast<std::size_t>(i)] == a(i + 1, i));
  }
  SUBCASE("diagonal stays diagonal") {
    BandMatrix b(3, 2);
    for (Index i = 0; i < 3; ++i) b.set(i, i, static_cast<double>(i + 1));
    const Tridiagonal t = band_to_tridiagonal_seq(b);
    CHECK(t.diag == std::vector<double>{1, 2, 3});
    CHECK(t.offdiag == std::vector<double>{0, 0});
  }
  SUBCASE("random banded matrices match the oracle") {
    for (Index n : {8, 17, 32, 64}) {
      for (Index bw : {2, 3, 7}) {
        if (bw >= n) continue;
        const Matrix a = testing::random_banded(n, bw, static_cast<std::uint64_t>(n + 100 * bw));
        const Tridiagonal t = band_to_tridiagonal_seq(BandMatrix::from_dense(a, bw));
        const auto got = tridiagonal_eigenvalues(t.diag, t.offdiag);
        CAPTURE(n);
        CAPTURE(bw);
        CHECK(testing::max_delta(got, testing::oracle_eigs(a)) <= 1e-12 * testing::spectral_norm(a));
      }
    }
  }
}

TEST_CASE("tridiagonal_eigenvalues examples") {
  CHECK(tridiagonal_eigenvalues({5}, {}) == std::vector<double>{5});
  const auto two = tridiagonal_eigenvalues({2, 2}, {1});
  CHECK(two[0] == doctest::Approx(1.0));
  CHECK(two[1] == doctest::Approx(3.0));
  const auto three = tridiagonal_eigenvalues({2, 2, 2}, {-1, -1});
  CHECK(three[0] == doctest::Approx(2.0 - std::sqrt(2.0)));
  CHECK(three[1] == doctest::Approx(2.0));
  CHECK(three[2] == doctest::Approx(2.0 + std::sqrt(2.0)));
  CHECK_THROWS_AS(tridiagonal_eigenvalues({1, 2}, {}), ShapeError);
}
