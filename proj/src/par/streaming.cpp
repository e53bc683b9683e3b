#include <algorithm>

#include "bspeig/bsp/collectives.hpp"
#include "bspeig/errors.hpp"
#include "bspeig/kernels.hpp"
#include "bspeig/meter.hpp"
#include "bspeig/par/matmul.hpp"

namespace bspeig::par {

using bsp::Axis;
using bsp::Dist1D;
using bsp::Transfer;

double streaming_memory_bound(Index m, Index n, Index k, int q, int c, int w) {
  const double md = static_cast<double>(m), nd = static_cast<double>(n), kd = static_cast<double>(k);
  return md * nd / (static_cast<double>(q) * q) + (md * kd + nd * kd) / (static_cast<double>(w) * q * c);
}

DistMatrix streaming_mm(const DistMatrix& a, const DistMatrix& b, const StreamingOptions& opts) {
  const DistMatrix* one[] = {&b};
  return streaming_mm(a, one, opts);
}

DistMatrix streaming_mm(const DistMatrix& a, std::span<const DistMatrix* const> b_stack,
                        const StreamingOptions& opts) {
  bsp::Engine& engine = a.engine();
  const Layout& la = a.layout();
  const int q = la.rows.parts();
  const int c = la.replicas;
  if (la.cols.parts() != q) throw InvalidArgument("streaming_mm: A must be split q x q");
  {
    std::vector<int> seen = la.owners;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw InvalidArgument("streaming_mm: A needs one cell per processor");
  }
  if (!a.replicas_identical()) throw InvalidArgument("streaming_mm: A replicas differ");
  if (b_stack.empty()) throw InvalidArgument("streaming_mm: empty B stack");
  const Index n = a.cols(), k = b_stack[0]->cols();
  Index stacked = 0;
  for (const DistMatrix* b : b_stack) {
    if (b->cols() != k) throw ShapeError("streaming_mm: stacked B column mismatch");
    stacked += b->rows();
  }
  if (stacked != n) throw ShapeError("streaming_mm: inner dimension mismatch");
  const int w = opts.w;
  if (w < 1 || w > q) throw InvalidArgument("streaming_mm: w must lie in [1, q]");

  auto grid = [&](int i, int j, int l) { return la.owner(l, i, j); };
  const int z = w * c;
  const Dist1D blocks = Dist1D::blocked(k, z);
  std::vector<Index> off{0};
  for (int h = 0; h < z; ++h) {
    const auto sub = bsp::scatter_offsets(blocks.local_size(h), q);
    for (int j = 0; j < q; ++j) off.push_back(blocks.offsets()[static_cast<std::size_t>(h)] + sub[static_cast<std::size_t>(j) + 1]);
  }
  const Dist1D colsplit = Dist1D::with_offsets(off);

  // B slices: block row j, column slice hq+i, held by grid (i, j, h mod c).
  Layout lb{la.cols, colsplit, 1, {}};
  lb.owners.resize(static_cast<std::size_t>(q * z * q));
  for (int h = 0; h < z; ++h)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) lb.owners[static_cast<std::size_t>(lb.cell(0, j, h * q + i))] = grid(i, j, h % c);
  DistMatrix bs(engine, lb);
  {
    Transfer t(engine);
    Index r0 = 0;
    for (const DistMatrix* b : b_stack) {
      t.copy(*b, 0, 0, bs, r0, 0, b->rows(), k);
      r0 += b->rows();
    }
    t.commit(engine.procs() > 1);
  }

  Layout lc{la.rows, colsplit, 1, {}};
  lc.owners.resize(static_cast<std::size_t>(q * z * q));
  for (int h = 0; h < z; ++h)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) lc.owners[static_cast<std::size_t>(lc.cell(0, i, h * q + j))] = grid(i, j, h % c);
  DistMatrix out(engine, lc);

  for (int t = 0; t < w; ++t) {
    // Gathered B_jh per (j, l), shared by the members of Pi[:, j, l].
    std::vector<Matrix> bfull(static_cast<std::size_t>(q * c));
    std::vector<bsp::MemoryLease> leases;
    engine.concurrently(q * c, [&](int g) {
      const int j = g % q, l = g / q, h = l + t * c;
      std::vector<Matrix> pieces;
      std::vector<int> group;
      for (int i = 0; i < q; ++i) {
        pieces.push_back(bs.tile(lb.cell(0, j, h * q + i)));
        group.push_back(grid(i, j, l));
      }
      auto got = bsp::collective_allgather(engine, pieces, group, Axis::cols);
      bfull[static_cast<std::size_t>(g)] = std::move(got[0]);
      for (int i = 0; i < q; ++i) leases.emplace_back(engine, group[static_cast<std::size_t>(i)], bfull[static_cast<std::size_t>(g)].size());
    });

    std::vector<Matrix> partial(static_cast<std::size_t>(q * q * c));
    for (int l = 0; l < c; ++l)
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
          const Matrix& at = a.tile(la.cell(l, i, j));
          const Matrix& bt = bfull[static_cast<std::size_t>(l * q + j)];
          Matrix& cb = partial[static_cast<std::size_t>((l * q + i) * q + j)];
          cb = Matrix(at.rows(), bt.cols());
          leases.emplace_back(engine, grid(i, j, l), cb.size());
          Meter meter(engine, grid(i, j, l));
          local_matmul_acc(at.view(), bt.view(), cb.view(), 1.0);
          meter.streaming_matmul(at.rows(), at.cols(), bt.cols());
        }

    engine.concurrently(q * c, [&](int g) {
      const int i = g % q, l = g / q, h = l + t * c;
      std::vector<int> group;
      for (int j = 0; j < q; ++j) group.push_back(grid(i, j, l));
      auto first = partial.begin() + (l * q + i) * q;
      auto got = bsp::collective_reduce_scatter(engine, std::span<const Matrix>(&*first, static_cast<std::size_t>(q)),
                                                group, Axis::cols);
      for (int j = 0; j < q; ++j) out.tile(lc.cell(0, i, h * q + j)) = std::move(got[static_cast<std::size_t>(j)]);
    });
  }
  return out;
}

}  // namespace bspeig::par
