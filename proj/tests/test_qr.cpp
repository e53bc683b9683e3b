#include <doctest.h>

#include <cmath>

#include "bspeig/kernels.hpp"
#include "bspeig/numeric.hpp"
#include "bspeig/par/qr.hpp"
#include "support.hpp"

using namespace bspeig;
using namespace bspeig::bsp;
using namespace bspeig::par;

namespace {

MachineParams machine(int p) {
  MachineParams m;
  m.p = p;
  return m;
}

void check_contracts(const Matrix& a, const Matrix& q, const Matrix& r) {
  const double m = static_cast<double>(a.rows()), n = static_cast<double>(a.cols());
  const Matrix qr = reference_product(q.view(), r.view());
  CHECK(frobenius_norm(subtract(a, qr).view()) <= 1e3 * kEps * std::sqrt(m * n) * frobenius_norm(a.view()));
  CHECK(orthogonality_residual(q.view()) <= 1e3 * kEps * n);
  for (Index i = 0; i < r.rows(); ++i)
    for (Index j = 0; j < i; ++j) CHECK(r(i, j) == 0.0);
}

// |R| agrees with the sequential factorization.
void check_r_unique(const Matrix& a, const Matrix& r) {
  const QrResult ref = local_qr(a.view());
  double d = 0.0;
  for (Index i = 0; i < r.rows(); ++i)
    for (Index j = 0; j < r.cols(); ++j) d = std::max(d, std::abs(std::abs(r(i, j)) - std::abs(ref.r(i, j))));
  CHECK(d <= 1e4 * kEps * frobenius_norm(a.view()));
}

}  // namespace

TEST_CASE("tree plan") {
  QrTreePlan p = QrTreePlan::make(64, 8, 8, 0.5);
  CHECK(p.r == 4);
  CHECK(p.q_max == 8);
  CHECK(QrTreePlan::make(16, 16, 4, 0.5).leaf());
  CHECK_THROWS_AS(QrTreePlan::make(4, 8, 4, 0.5), ShapeError);
}

TEST_CASE("rect_qr contracts") {
  struct Case {
    Index m, n;
    int p;
  };
  for (const Case c : {Case{64, 8, 1}, Case{64, 8, 4}, Case{64, 8, 8}, Case{256, 32, 1}, Case{256, 32, 4},
                       Case{256, 32, 8}, Case{16, 16, 1}, Case{16, 16, 4}, Case{16, 16, 8}, Case{50, 7, 8},
                       Case{33, 33, 4}, Case{12, 5, 6}}) {
    Engine e(machine(c.p));
    const auto ids = iota_procs(0, c.p);
    const Matrix a = testing::random_matrix(c.m, c.n, static_cast<std::uint64_t>(c.m * 7 + c.n + c.p));
    DistMatrix da = DistMatrix::place(e, a, Layout::block_rows(c.m, c.n, ids));
    ParQr res = rect_qr(da, ids);
    CAPTURE(c.m);
    CAPTURE(c.n);
    CAPTURE(c.p);
    const Matrix q = res.q.gather(), r = res.r.gather();
    check_contracts(a, q, r);
    check_r_unique(a, r);
    CHECK(e.ledger().conserves_words());

    HouseholderQr hq = householder_qr(da, ids);
    const HouseholderFactor f = hq.factor.gather();
    CHECK(householder_identity_residual(f) <= 1e3 * kEps * static_cast<double>(c.n));
    check_contracts(a, explicit_q(f), hq.r.gather());
  }
}

TEST_CASE("rect_qr p = 1 matches local_qr") {
  Engine e(machine(1));
  const Matrix a = testing::random_matrix(20, 4, 3);
  ParQr res = rect_qr(DistMatrix::place(e, a, Layout::single(20, 4, 0)), iota_procs(0, 1));
  const QrResult ref = local_qr(a.view());
  CHECK(res.r.gather() == ref.r);
  CHECK(e.ledger().W() == 0);
}

TEST_CASE("rect_qr on orthonormal columns") {
  Engine e(machine(4));
  const auto ids = iota_procs(0, 4);
  const Matrix a = Matrix::eye(16, 2);
  ParQr res = rect_qr(DistMatrix::place(e, a, Layout::block_rows(16, 2, ids)), ids);
  const Matrix r = res.r.gather(), q = res.q.gather();
  for (Index i = 0; i < 2; ++i) CHECK(std::abs(r(i, i)) == doctest::Approx(1.0));
  for (Index i = 0; i < 16; ++i)
    for (Index j = 0; j < 2; ++j) CHECK(std::abs(q(i, j)) == doctest::Approx(std::abs(a(i, j))));
}

TEST_CASE("square_qr examples") {
  SUBCASE("identity") {
    Engine e(machine(4));
    const auto ids = iota_procs(0, 4);
    ParQr res = square_qr(DistMatrix::place(e, Matrix::identity(8), Layout::block_rows(8, 8, ids)), ids);
    const Matrix r = res.r.gather();
    for (Index i = 0; i < 8; ++i) CHECK(std::abs(r(i, i)) == doctest::Approx(1.0));
    CHECK(orthogonality_residual(res.q.gather().view()) < 1e-13);
  }
  SUBCASE("stacked triangles") {
    Engine e(machine(2));
    const auto ids = iota_procs(0, 2);
    Matrix a = testing::random_matrix(8, 4, 21);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < (i % 4); ++j) a(i, j) = 0.0;
    ParQr res = square_qr(DistMatrix::place(e, a, Layout::block_rows(8, 4, ids)), ids);
    check_contracts(a, res.q.gather(), res.r.gather());
    check_r_unique(a, res.r.gather());
  }
  SUBCASE("too many processors") {
    Engine e(machine(8));
    DistMatrix a = DistMatrix::place(e, Matrix::identity(4), Layout::single(4, 4, 0));
    CHECK_THROWS_AS(square_qr(a, iota_procs(0, 8)), InvalidArgument);
  }
}

TEST_CASE("householder_reconstruct examples") {
  SUBCASE("Q = E") {
    Engine e(machine(2));
    const auto ids = iota_procs(0, 2);
    DistHouseholder h = householder_reconstruct(DistMatrix::place(e, Matrix::eye(6, 3), Layout::block_rows(6, 3, ids)), ids);
    const HouseholderFactor f = h.gather();
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j)
        if (i != j) CHECK(f.t(i, j) == 0.0);
    const Matrix back = explicit_q(f);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 3; ++j)
        CHECK(back(i, j) == doctest::Approx((i == j ? 1.0 : 0.0) * h.signs[static_cast<std::size_t>(j)]));
  }
  SUBCASE("from a local QR") {
    Engine e(machine(2));
    const auto ids = iota_procs(0, 2);
    const QrResult qr = local_qr(testing::random_matrix(8, 2, 5).view());
    const Matrix q = explicit_q(qr.factor);
    DistHouseholder h = householder_reconstruct(DistMatrix::place(e, q, Layout::block_rows(8, 2, ids)), ids);
    const HouseholderFactor f = h.gather();
    CHECK(householder_identity_residual(f) <= 1e3 * kEps * 2);
    Matrix qs = q;
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 2; ++j) qs(i, j) *= h.signs[static_cast<std::size_t>(j)];
    CHECK(max_abs_diff(explicit_q(f).view(), qs.view()) <= 1e3 * kEps * std::sqrt(8.0));
  }
  SUBCASE("single reflector") {
    Engine e(machine(1));
    Matrix q(4, 1);
    q(0, 0) = 0.5;
    q(1, 0) = 0.5;
    q(2, 0) = -0.5;
    q(3, 0) = 0.5;
    DistHouseholder h = householder_reconstruct(DistMatrix::place(e, q, Layout::single(4, 1, 0)), iota_procs(0, 1));
    const HouseholderFactor f = h.gather();
    double utu = 0.0;
    for (Index i = 0; i < 4; ++i) utu += f.u(i, 0) * f.u(i, 0);
    CHECK(f.t(0, 0) == doctest::Approx(2.0 / utu));
  }
}

TEST_CASE("rect_qr supersteps do not grow with m") {
  auto steps = [](Index m) {
    Engine e(machine(8));
    const auto ids = iota_procs(0, 8);
    DistMatrix a = DistMatrix::place(e, testing::random_matrix(m, 8, 1), Layout::block_rows(m, 8, ids));
    rect_qr(a, ids);
    return e.ledger().S();
  };
  CHECK(steps(256) <= steps(128));
  CHECK(steps(512) <= steps(256));
}
