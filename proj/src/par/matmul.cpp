#include "bspeig/par/matmul.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "bspeig/errors.hpp"
#include "bspeig/kernels.hpp"
#include "bspeig/numeric.hpp"

namespace bspeig::par {

using bsp::Dist1D;
using bsp::Transfer;

namespace {

// Global indices of round r out of v for every part of d, plus compact part offsets.
struct Slab {
  std::vector<Index> idx;
  std::vector<Index> off{0};
  std::vector<Index> local_lo;  // first local index of the chunk inside each part
};

Slab make_slab(const Dist1D& d, int v, int r) {
  Slab s;
  for (int part = 0; part < d.parts(); ++part) {
    const Index len = d.local_size(part);
    const Index lo = len * r / v;
    const Index hi = len * (r + 1) / v;
    for (Index t = lo; t < hi; ++t) s.idx.push_back(d.global_of(part, t));
    s.off.push_back(s.off.back() + (hi - lo));
    s.local_lo.push_back(lo);
  }
  return s;
}

}  // namespace

CarmaGrid carma_grid(Index m, Index n, Index k, int p) {
  CarmaGrid g;
  Index dm = m, dn = n, dk = k;
  while (p > 1) {
    const Index big = std::max({dm, dn, dk});
    if (big < 2) break;
    if (dm == big) {
      g.pm *= 2;
      dm = (dm + 1) / 2;
    } else if (dn == big) {
      g.pn *= 2;
      dn = (dn + 1) / 2;
    } else {
      g.pk *= 2;
      dk = (dk + 1) / 2;
    }
    p /= 2;
  }
  return g;
}

int default_v(int p, Index n, Index m, double delta) {
  if (m <= 0) return 1;
  const double x = static_cast<double>(p) * static_cast<double>(n) / static_cast<double>(m);
  const double v = std::pow(std::max(x, 1.0), 2.0 - 3.0 * delta);
  return std::max(1, static_cast<int>(std::lround(v)));
}

Layout carma_output_layout(Index m, Index k, const CarmaGrid& g, std::span<const int> procs) {
  const Dist1D rows = Dist1D::blocked(m, g.pm);
  std::vector<Index> off{0};
  for (int a = 0; a < g.pm; ++a) {
    const Index len = rows.local_size(a);
    for (int b = 0; b < g.pn; ++b) off.push_back(rows.offsets()[static_cast<std::size_t>(a)] + len * (b + 1) / g.pn);
  }
  Layout l{Dist1D::with_offsets(off), Dist1D::blocked(k, g.pk), 1, {}};
  l.owners.resize(static_cast<std::size_t>(g.pm * g.pn * g.pk));
  for (int a = 0; a < g.pm; ++a)
    for (int b = 0; b < g.pn; ++b)
      for (int c = 0; c < g.pk; ++c)
        l.owners[static_cast<std::size_t>(l.cell(0, a * g.pn + b, c))] =
            procs[static_cast<std::size_t>((a * g.pn + b) * g.pk + c)];
  return l;
}

namespace {

struct Plan {
  CarmaGrid g;
  std::vector<int> leaves;
};

Plan plan_for(Index m, Index n, Index k, std::span<const int> procs_in) {
  if (procs_in.empty()) throw InvalidArgument("par_matmul: empty processor set");
  const auto p = static_cast<int>(pow2_floor(static_cast<double>(procs_in.size())));
  Plan pl{carma_grid(m, n, k, p), {}};
  pl.leaves.assign(procs_in.begin(), procs_in.begin() + pl.g.procs());
  return pl;
}

// Leaf partial products: replica y holds the contribution of inner block y.
DistMatrix multiply_partials(const Operand& a, const Operand& b, const Plan& pl, double alpha, int v_req) {
  if (a.cols != b.rows) throw ShapeError("par_matmul: inner dimension mismatch");
  if (v_req < 1) throw InvalidArgument("par_matmul: v must be >= 1");
  bsp::Engine& engine = a.m->engine();
  const Index m = a.rows, n = a.cols, k = b.cols;
  const CarmaGrid& g = pl.g;
  auto leaf = [&](int x, int y, int z) { return pl.leaves[static_cast<std::size_t>((x * g.pn + y) * g.pk + z)]; };

  const Dist1D rows = Dist1D::blocked(m, g.pm);
  const Dist1D inner = Dist1D::blocked(n, g.pn);
  const Dist1D cols = Dist1D::blocked(k, g.pk);

  Layout part_layout{rows, cols, g.pn, {}};
  part_layout.owners.resize(static_cast<std::size_t>(g.procs()));
  for (int y = 0; y < g.pn; ++y)
    for (int x = 0; x < g.pm; ++x)
      for (int z = 0; z < g.pk; ++z) part_layout.owners[static_cast<std::size_t>(part_layout.cell(y, x, z))] = leaf(x, y, z);
  DistMatrix partial(engine, part_layout);

  // Split the largest leaf-local extent into v rounds.
  const Index em = rows.max_local(), en = inner.max_local(), ek = cols.max_local();
  const Index big = std::max({em, en, ek});
  const char split = em == big ? 'm' : (en == big ? 'n' : 'k');
  const int v = static_cast<int>(std::clamp<Index>(v_req, 1, std::max<Index>(big, 1)));

  std::optional<DistMatrix> abuf, bbuf;
  Slab sm, sn, sk;
  for (int r = 0; r < v; ++r) {
    const bool fetch_a = r == 0 || split != 'k';
    const bool fetch_b = r == 0 || split != 'm';
    sm = make_slab(rows, split == 'm' ? v : 1, split == 'm' ? r : 0);
    sk = make_slab(cols, split == 'k' ? v : 1, split == 'k' ? r : 0);
    sn = make_slab(inner, split == 'n' ? v : 1, split == 'n' ? r : 0);

    Transfer t(engine);
    if (fetch_a) {
      abuf.reset();
      Layout la{Dist1D::with_offsets(sm.off), Dist1D::with_offsets(sn.off), g.pk, {}};
      la.owners.resize(static_cast<std::size_t>(g.procs()));
      for (int z = 0; z < g.pk; ++z)
        for (int x = 0; x < g.pm; ++x)
          for (int y = 0; y < g.pn; ++y) la.owners[static_cast<std::size_t>(la.cell(z, x, y))] = leaf(x, y, z);
      abuf.emplace(engine, la);
      for (std::size_t i = 0; i < sm.idx.size(); ++i)
        for (std::size_t j = 0; j < sn.idx.size(); ++j) {
          const auto [si, sj] = a.source(sm.idx[i], sn.idx[j]);
          t.copy_element(*a.m, si, sj, *abuf, static_cast<Index>(i), static_cast<Index>(j));
        }
    }
    if (fetch_b) {
      bbuf.reset();
      Layout lb{Dist1D::with_offsets(sn.off), Dist1D::with_offsets(sk.off), g.pm, {}};
      lb.owners.resize(static_cast<std::size_t>(g.procs()));
      for (int x = 0; x < g.pm; ++x)
        for (int y = 0; y < g.pn; ++y)
          for (int z = 0; z < g.pk; ++z) lb.owners[static_cast<std::size_t>(lb.cell(x, y, z))] = leaf(x, y, z);
      bbuf.emplace(engine, lb);
      for (std::size_t i = 0; i < sn.idx.size(); ++i)
        for (std::size_t j = 0; j < sk.idx.size(); ++j) {
          const auto [si, sj] = b.source(sn.idx[i], sk.idx[j]);
          t.copy_element(*b.m, si, sj, *bbuf, static_cast<Index>(i), static_cast<Index>(j));
        }
    }
    t.commit();

    for (int x = 0; x < g.pm; ++x)
      for (int y = 0; y < g.pn; ++y)
        for (int z = 0; z < g.pk; ++z) {
          const Matrix& at = abuf->tile(abuf->layout().cell(z, x, y));
          const Matrix& bt = bbuf->tile(bbuf->layout().cell(x, y, z));
          Matrix& ct = partial.tile(part_layout.cell(y, x, z));
          if (at.rows() == 0 || bt.cols() == 0) continue;
          const Index r0 = split == 'm' ? sm.local_lo[static_cast<std::size_t>(x)] : 0;
          const Index c0 = split == 'k' ? sk.local_lo[static_cast<std::size_t>(z)] : 0;
          local_matmul_acc(at.view(), bt.view(), ct.block(r0, c0, at.rows(), bt.cols()), alpha,
                           Meter(engine, leaf(x, y, z)));
        }
  }
  return partial;
}

// Sums the replicas of the partial product into c[r0:, c0:] in ascending inner-block order.
void reduce_into(const DistMatrix& partial, DistMatrix& c, Index r0, Index c0, bool accumulate) {
  Transfer t(c.engine());
  for (int y = 0; y < partial.layout().replicas; ++y) {
    if (y == 0 && !accumulate) t.copy(partial, 0, 0, c, r0, c0, partial.rows(), partial.cols(), false, 0);
    else t.add(partial, 0, 0, c, r0, c0, partial.rows(), partial.cols(), false, y);
  }
  t.commit();
}

}  // namespace

DistMatrix par_matmul(const Operand& a, const Operand& b, std::span<const int> procs, const MatmulOptions& opts) {
  const Plan pl = plan_for(a.rows, a.cols, b.cols, procs);
  DistMatrix partial = multiply_partials(a, b, pl, 1.0, opts.v);
  const Layout target = opts.out ? *opts.out : carma_output_layout(a.rows, b.cols, pl.g, pl.leaves);
  if (target.rows.size() != a.rows || target.cols.size() != b.cols) throw ShapeError("par_matmul: output layout shape");
  DistMatrix c(a.m->engine(), target);
  reduce_into(partial, c, 0, 0, false);
  return c;
}

void par_matmul_into(const Operand& a, const Operand& b, DistMatrix& c, Index r0, Index c0, double alpha,
                     bool accumulate, std::span<const int> procs, int v) {
  if (r0 < 0 || c0 < 0 || r0 + a.rows > c.rows() || c0 + b.cols > c.cols())
    throw ShapeError("par_matmul_into: target block outside the output");
  const Plan pl = plan_for(a.rows, a.cols, b.cols, procs);
  DistMatrix partial = multiply_partials(a, b, pl, alpha, v);
  reduce_into(partial, c, r0, c0, accumulate);
}

}  // namespace bspeig::par
