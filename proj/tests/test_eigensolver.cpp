#include <doctest.h>

#include "bspeig/eigensolver.hpp"
#include "support.hpp"

using namespace bspeig;

namespace {

double rel_err(const std::vector<double>& got, const Matrix& a) {
  return testing::max_delta(got, testing::oracle_eigs(a)) / testing::spectral_norm(a);
}

}  // namespace

TEST_CASE("schedule n=1024, p=8, delta=2/3") {
  const ReductionSchedule s = choose_schedule(1024, 8, 2.0 / 3.0);
  CHECK(s.b == 256);
  REQUIRE(s.stages.size() == 3);
  CHECK(s.stages[0] == Stage{StageKind::full_to_band, 1024, 256, 8});
  CHECK(s.stages[1] == Stage{StageKind::ca_br, 256, 128, 4});
  CHECK(s.stages[2].kind == StageKind::sequential);
  CHECK(s.final_b == 128);
}

TEST_CASE("schedule n=256, p=16, delta=1/2") {
  const ReductionSchedule s = choose_schedule(256, 16, 0.5);
  CHECK(s.b == 64);
  REQUIRE(s.stages.size() == 4);
  CHECK(s.stages[1] == Stage{StageKind::ca_br, 64, 32, 4});
  CHECK(s.stages[2] == Stage{StageKind::ca_br, 32, 16, 4});
  CHECK(s.final_b == 16);
}

TEST_CASE("schedule with band-to-band stages") {
  // p = 64, delta = 2/3: b = n/8, p^delta = 16, so one halving by band-to-band.
  const ReductionSchedule s = choose_schedule(256, 64, 2.0 / 3.0);
  CHECK(s.b == 32);
  REQUIRE(s.stages.size() >= 3);
  CHECK(s.stages[1] == Stage{StageKind::band_to_band, 32, 16, 64});
  CHECK(s.stages[2] == Stage{StageKind::ca_br, 16, 8, 16});
  CHECK(s.final_b == 4);
  // Band-to-band processor counts shrink by 2^zeta per stage.
  const ReductionSchedule t = choose_schedule(4096, 64, 2.0 / 3.0);
  int prev = 1 << 30;
  for (const Stage& st : t.stages)
    if (st.kind == StageKind::band_to_band) {
      CHECK(st.procs <= prev);
      CHECK(st.procs * st.b_in >= t.n);
      prev = st.procs;
    }
}

TEST_CASE("schedule rejects bad input") {
  CHECK_THROWS_AS(choose_schedule(4, 8, 0.5), InvalidArgument);
  CHECK_THROWS_AS(choose_schedule(64, 6, 0.5), InvalidArgument);
  CHECK_THROWS_AS(choose_schedule(64, 4, 0.7), InvalidArgument);
  const ReductionSchedule one = choose_schedule(5, 1, 0.5);
  REQUIRE(one.stages.size() == 1);
  CHECK(one.stages[0].kind == StageKind::sequential);
}

TEST_CASE("diag(1..8) on 4 processors") {
  Matrix a(8, 8);
  for (Index i = 0; i < 8; ++i) a(i, i) = static_cast<double>(i + 1);
  const EigenResult r = symmetric_eigenvalues(a, 4);
  REQUIRE(r.eigenvalues.size() == 8);
  for (Index i = 0; i < 8; ++i) CHECK(r.eigenvalues[static_cast<std::size_t>(i)] == doctest::Approx(i + 1.0));
}

TEST_CASE("2x2 sequential") {
  const Matrix a = Matrix::from_rows({{2, 1}, {1, 2}});
  const EigenResult r = symmetric_eigenvalues(a, 1);
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(3.0));
  CHECK(r.ledger.W() == 0);
}

TEST_CASE("random n=64, p=4, seed 42") {
  const Matrix a = testing::random_symmetric(64, 42);
  const EigenResult r = symmetric_eigenvalues(a, 4);
  CHECK(rel_err(r.eigenvalues, a) <= 1e-9);
}

TEST_CASE("stage boundaries keep the spectrum and ledgers add up") {
  for (int p : {4, 16}) {
    const Matrix a = testing::random_symmetric(64, 7);
    const auto ref = testing::oracle_eigs(a);
    const double norm = testing::spectral_norm(a);
    SolverOptions o;
    int calls = 0;
    o.on_stage = [&](const StageRecord&, const BandMatrix& band) {
      ++calls;
      CHECK(testing::max_delta(testing::oracle_eigs(band.to_dense()), ref) <= 1e-10 * norm);
    };
    const EigenResult r = symmetric_eigenvalues(a, p, o);
    CHECK(calls == static_cast<int>(r.stages.size()) - 1);
    bsp::CostTotals sum;
    for (const StageRecord& st : r.stages) {
      sum.F += st.ledger.F();
      sum.W += st.ledger.W();
      sum.Q += st.ledger.Q();
      sum.S += st.ledger.S();
    }
    CHECK(sum == r.ledger.totals());
  }
}

TEST_CASE("delta = 2/3 on 8 and 64 processors") {
  for (int p : {8, 64}) {
    const Matrix a = testing::random_symmetric(128, 3);
    SolverOptions o;
    o.delta = 2.0 / 3.0;
    const EigenResult r = symmetric_eigenvalues(a, p, o);
    CHECK(rel_err(r.eigenvalues, a) <= 1e-9);
  }
}

TEST_CASE("padding to a multiple of p") {
  for (Index n : {5, 30, 50}) {
    const Matrix a = testing::random_symmetric(n, 13);
    const EigenResult r = symmetric_eigenvalues(a, 16);
    CHECK(r.padding == (n % 16 == 0 ? 0 : 16 - n % 16));
    REQUIRE(r.eigenvalues.size() == static_cast<std::size_t>(n));
    CHECK(rel_err(r.eigenvalues, a) <= 1e-9);
  }
  // A genuine eigenvalue 1 survives the stripping.
  Matrix d(6, 6);
  for (Index i = 0; i < 6; ++i) d(i, i) = i == 2 ? 1.0 : 3.0 + static_cast<double>(i);
  const EigenResult r = symmetric_eigenvalues(d, 4);
  REQUIRE(r.eigenvalues.size() == 6);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0));
}

TEST_CASE("non power of two processor counts round down") {
  const Matrix a = testing::random_symmetric(48, 2);
  const EigenResult r = symmetric_eigenvalues(a, 6);
  CHECK(r.procs == 4);
  CHECK_FALSE(r.notes.empty());
  CHECK(rel_err(r.eigenvalues, a) <= 1e-9);
}

TEST_CASE("asymmetric input is rejected") {
  Matrix a = testing::random_symmetric(8, 1);
  a(0, 1) += 1.0;
  CHECK_THROWS_AS(symmetric_eigenvalues(a, 4), InvalidArgument);
}

TEST_CASE("two runs agree bit for bit") {
  const Matrix a = testing::random_symmetric(64, 5);
  const EigenResult r1 = symmetric_eigenvalues(a, 16);
  const EigenResult r2 = symmetric_eigenvalues(a, 16);
  CHECK(r1.eigenvalues == r2.eigenvalues);
  CHECK(r1.ledger == r2.ledger);
}
