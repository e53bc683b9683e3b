#include <doctest.h>

#include <set>
#include <utility>

#include "bspeig/band.hpp"
#include "bspeig/numeric.hpp"
#include "bspeig/reduce/bulge.hpp"
#include "support.hpp"

using namespace bspeig;
using namespace bspeig::reduce;

namespace {

using Entry = std::pair<Index, Index>;

std::set<Entry> touched(const BulgeIndexSet& s) {
  std::set<Entry> out;
  auto add = [&](Index a, Index b) { out.insert({std::max(a, b), std::min(a, b)}); };
  for (Index r = s.qr_rows().begin; r < s.qr_rows().end; ++r) {
    for (Index c = s.qr_cols().begin; c < s.qr_cols().end; ++c) add(r, c);
    for (Index c = s.up_cols().begin; c < s.up_cols().end; ++c) add(r, c);
  }
  return out;
}

}  // namespace

TEST_CASE("bulge index set for n=8, b=4, k=2") {
  const BulgeIndexSet s = bulge_indices(8, 4, 2, 1, 1);
  CHECK(s.h == 2);
  CHECK(s.o_blg == 0);
  CHECK(s.o_qr_r == 2);
  CHECK(s.o_qr_c == 0);
  CHECK(s.n_r == 4);
  // 1-based 3..6 and 1..2
  CHECK(s.qr_rows() == Range{2, 6});
  CHECK(s.qr_cols() == Range{0, 2});
  CHECK(s.o_v == 0);
  CHECK(s.o_up_c == 2);

  const BulgeIndexSet t = bulge_indices(16, 4, 2, 2, 2);
  CHECK(t.o_blg == 6);
  CHECK(t.o_qr_r == 8);
  CHECK(t.o_qr_c == 4);
  CHECK(t.o_v == 2);
  CHECK(t.o_up_c == 6);
  CHECK(t.n_c == 10);
  CHECK(t.v_rows() == Range{2, 6});
}

TEST_CASE("sweep lengths keep every QR block a multiple of h") {
  for (Index n : {16, 32, 48}) {
    for (Index b : {4, 8}) {
      for (Index k : {2, 4}) {
        if (n % b != 0) continue;
        const Index h = b / k;
        for (int i = 1; i <= n / h - 1; ++i) {
          const int count = chases_in_sweep(n, b, k, i);
          for (int j = 1; j <= count; ++j) {
            const BulgeIndexSet s = bulge_indices(n, b, k, i, j);
            CHECK(s.n_r >= h);
            CHECK(s.n_r % h == 0);
            CHECK(s.o_v + s.n_r <= s.n_c);
            CHECK(s.up_cols().end <= n);
          }
        }
      }
    }
  }
  CHECK_THROWS_AS(bulge_indices(16, 4, 3, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(bulge_indices(16, 4, 2, 0, 1), InvalidArgument);
}

TEST_CASE("chases sharing a phase touch disjoint entries") {
  for (Index n : {16, 32, 64}) {
    for (Index b : {4, 8}) {
      for (Index k : {2, 4}) {
        const auto phases = chase_phases(n, b, k);
        std::size_t total = 0;
        for (const auto& ph : phases) {
          total += ph.size();
          std::set<Entry> seen;
          for (const Chase& c : ph) {
            for (const Entry& e : touched(bulge_indices(n, b, k, c.i, c.j))) CHECK(seen.insert(e).second);
          }
        }
        std::size_t expect = 0;
        for (int i = 1; i <= n / (b / k) - 1; ++i) expect += static_cast<std::size_t>(chases_in_sweep(n, b, k, i));
        CHECK(total == expect);
      }
    }
  }
}

TEST_CASE("chases stay inside the fill capacity") {
  const Index n = 32, b = 8, k = 2;
  const Index cap = bulge_capacity(b, k);
  for (const auto& ph : chase_phases(n, b, k))
    for (const Chase& c : ph)
      for (const Entry& e : touched(bulge_indices(n, b, k, c.i, c.j))) CHECK(e.first - e.second <= cap);
}

TEST_CASE("dense reference halves the band and keeps the spectrum") {
  struct Case {
    Index n, b, k;
  };
  for (const Case& c : {Case{16, 4, 2}, Case{32, 8, 2}, Case{32, 8, 4}, Case{48, 12, 3}, Case{64, 16, 2}}) {
    const Matrix a = testing::random_banded(c.n, c.b, 11 + static_cast<std::uint64_t>(c.n));
    Matrix w = a;
    band_to_band_dense(w, c.b, c.k);
    const Index h = c.b / c.k;
    const double norm = testing::spectral_norm(a);
    CHECK(BandMatrix::out_of_band(w, h) <= 1e3 * kEps * norm);
    const auto before = testing::oracle_eigs(a);
    const auto after = testing::oracle_eigs(BandMatrix::from_dense(w, h).to_dense());
    CHECK(testing::max_delta(before, after) <= 1e-10 * norm);
  }
}

TEST_CASE("already reduced input is left alone up to signs") {
  const Matrix a = testing::random_banded(16, 2, 5);
  Matrix w = a;
  band_to_band_dense(w, 4, 2);
  for (Index i = 0; i < 16; ++i) CHECK(std::abs(std::abs(w(i, i)) - std::abs(a(i, i))) <= 1e-12);
  CHECK(BandMatrix::out_of_band(w, 2) <= 1e-12);
}

TEST_CASE("local chase leaves R on top of the panel") {
  Matrix p = testing::random_matrix(4, 2, 3);
  const Matrix p0 = p;
  Matrix x(6, 4);
  chase_local(p.view(), x.view(), 0);
  CHECK(p(1, 0) == 0.0);
  CHECK(p(2, 0) == 0.0);
  CHECK(p(3, 1) == 0.0);
  // Column norms survive the reflection.
  for (Index c = 0; c < 2; ++c) {
    double a = 0, b = 0;
    for (Index r = 0; r < 4; ++r) {
      a += p0(r, c) * p0(r, c);
      b += p(r, c) * p(r, c);
    }
    CHECK(a == doctest::Approx(b));
  }
  CHECK(max_abs(x.view()) == 0.0);
}
