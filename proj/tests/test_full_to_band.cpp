#include <doctest.h>

#include <cmath>

#include "bspeig/band.hpp"
#include "bspeig/reduce/full_to_band.hpp"
#include "support.hpp"

using namespace bspeig;
using namespace bspeig::bsp;
using namespace bspeig::reduce;

namespace {

MachineParams machine(int p) {
  MachineParams m;
  m.p = p;
  return m;
}

std::vector<double> band_eigs(const BandMatrix& b) { return testing::oracle_eigs(b.to_dense()); }

struct Run {
  BandMatrix band;
  CostLedger ledger;
};

Run run_f2b(const Matrix& a, int q, int c, Index b) {
  const int p = q * q * c;
  Engine e(machine(p));
  const auto ids = iota_procs(0, p);
  const ProcGrid g = ProcGrid::make(ids, q, c);
  DistMatrix da = DistMatrix::place(e, a, Layout::block_rows(a.rows(), a.cols(), ids));
  FullToBandOptions o;
  o.b = b;
  DistBand band = full_to_band(da, g, o);
  e.settle();
  return {band.gather(), e.ledger()};
}

}  // namespace

TEST_CASE("n <= b returns A") {
  const Matrix a = testing::random_symmetric(8, 1);
  Run r = run_f2b(a, 2, 1, 8);
  CHECK(max_abs_diff(r.band.to_dense().view(), a.view()) == 0.0);
}

TEST_CASE("diagonal input keeps its spectrum") {
  Matrix a(16, 16);
  for (Index i = 0; i < 16; ++i) a(i, i) = static_cast<double>(i + 1);
  Run r = run_f2b(a, 2, 1, 4);
  const auto e = band_eigs(r.band);
  for (Index i = 0; i < 16; ++i) CHECK(std::abs(e[static_cast<std::size_t>(i)] - static_cast<double>(i + 1)) <= 1e-12);
}

TEST_CASE("random symmetric matrices reduce with the same spectrum") {
  struct Case {
    Index n, b;
    int q, c;
  };
  for (const Case s : {Case{16, 4, 2, 1}, Case{32, 8, 2, 2}, Case{64, 16, 4, 1}, Case{64, 8, 2, 2}, Case{48, 12, 2, 1},
                       Case{64, 16, 4, 4}}) {
    const Matrix a = testing::random_symmetric(s.n, static_cast<std::uint64_t>(s.n + s.b));
    Run r = run_f2b(a, s.q, s.c, s.b);
    CAPTURE(s.n);
    CAPTURE(s.b);
    CAPTURE(s.c);
    CHECK(testing::max_delta(band_eigs(r.band), testing::oracle_eigs(a)) <= 1e-10 * testing::spectral_norm(a));
    CHECK(r.ledger.conserves_words());
  }
}

TEST_CASE("initial aggregated update is applied") {
  const Index n = 16;
  const int p = 4;
  Engine e(machine(p));
  const auto ids = iota_procs(0, p);
  const ProcGrid g = ProcGrid::make(ids, 2, 1);
  const Matrix a = testing::random_symmetric(n, 3);
  const Matrix u = testing::random_matrix(n, 2, 4), v = testing::random_matrix(n, 2, 5);
  AggregatedUpdate up{DistMatrix::place(e, u, Layout::replicated_cyclic(n, 2, g)),
                      DistMatrix::place(e, v, Layout::replicated_cyclic(n, 2, g))};
  FullToBandOptions o;
  o.b = 4;
  DistBand band = full_to_band(DistMatrix::place(e, a, Layout::block_rows(n, n, ids)), g, o, &up);
  Matrix full = add(add(a, reference_product(u.view(), v.transposed().view())),
                    reference_product(v.view(), u.transposed().view()));
  CHECK(testing::max_delta(band_eigs(band.gather()), testing::oracle_eigs(full)) <= 1e-10 * testing::spectral_norm(full));
}

TEST_CASE("argument checks") {
  Engine e(machine(4));
  const auto ids = iota_procs(0, 4);
  const ProcGrid g = ProcGrid::make(ids, 2, 1);
  DistMatrix a = DistMatrix::place(e, Matrix::identity(12), Layout::block_rows(12, 12, ids));
  FullToBandOptions o;
  o.b = 5;
  CHECK_THROWS_AS(full_to_band(a, g, o), InvalidArgument);
  o.b = 3;
  CHECK_THROWS_AS(full_to_band(a, g, o), InvalidArgument);
  o.b = 0;
  CHECK_THROWS_AS(full_to_band(a, g, o), InvalidArgument);
  o.b = 2;
  full_to_band(a, g, o);
  CHECK_FALSE(e.notes().empty());
}

TEST_CASE("plan parameters") {
  const auto ids = iota_procs(0, 64);
  FullToBandOptions o;
  o.b = 32;
  FullToBandPlan flat = plan_full_to_band(256, ProcGrid::make(ids, 8, 1), o);
  CHECK(flat.z == 1);
  CHECK(flat.w == 1);
  CHECK(flat.in_range);
  FullToBandPlan deep = plan_full_to_band(256, ProcGrid::make(ids, 4, 4), o);
  CHECK(deep.z == 1);
  CHECK(deep.w == 1);
  CHECK(deep.in_range);
}
