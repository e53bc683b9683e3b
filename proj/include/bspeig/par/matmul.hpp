#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bspeig/bsp/dist_matrix.hpp"

namespace bspeig::par {

using bsp::DistMatrix;
using bsp::Layout;

// Processor grid of the recursive multiply: pm x pn x pk leaves.
struct CarmaGrid {
  int pm = 1;
  int pn = 1;
  int pk = 1;
  int procs() const { return pm * pn * pk; }
};

// Halves the largest of (m, n, k), ties in that order, once per factor of two in p.
CarmaGrid carma_grid(Index m, Index n, Index k, int p);

// (p n / m)^(2 - 3 delta), rounded, at least 1.
int default_v(int p, Index n, Index m, double delta);

// A block of a distributed matrix or of its transpose: (T ? M^T : M)[r0:r0+rows, c0:c0+cols].
struct Operand {
  const DistMatrix* m = nullptr;
  Index r0 = 0;
  Index c0 = 0;
  Index rows = 0;
  Index cols = 0;
  bool transposed = false;

  Operand(const DistMatrix& d)  // NOLINT: implicit on purpose
      : m(&d), rows(d.rows()), cols(d.cols()) {}
  Operand(const DistMatrix& d, Index r0_, Index c0_, Index rows_, Index cols_, bool t = false)
      : m(&d), r0(r0_), c0(c0_), rows(rows_), cols(cols_), transposed(t) {}
  static Operand trans(const DistMatrix& d) { return {d, 0, 0, d.cols(), d.rows(), true}; }
  // Global position of entry (i, j) in the underlying matrix.
  std::pair<Index, Index> source(Index i, Index j) const {
    return transposed ? std::pair{c0 + j, r0 + i} : std::pair{r0 + i, c0 + j};
  }
};

struct MatmulOptions {
  int v = 1;                    // rounds the operand fetch is split into
  const Layout* out = nullptr;  // target layout, default: the leaf layout
};

// C = A B over procs (rounded down to a power of two). Each round fetches the leaves'
// operand blocks in one superstep; partial sums over the inner splits are added into the
// output in ascending order in one more superstep when the inner dimension was split.
DistMatrix par_matmul(const Operand& a, const Operand& b, std::span<const int> procs,
                      const MatmulOptions& opts = {});

// C[r0:, c0:] = alpha A B, or += when accumulate. Same supersteps as par_matmul.
void par_matmul_into(const Operand& a, const Operand& b, DistMatrix& c, Index r0, Index c0, double alpha,
                     bool accumulate, std::span<const int> procs, int v = 1);

// Default output layout for an m x k product on the given grid.
Layout carma_output_layout(Index m, Index k, const CarmaGrid& g, std::span<const int> procs);

struct StreamingOptions {
  int w = 1;
};

// Algorithm-1 style multiply. `a` must be replicated on a q x q x c grid (one cell per
// processor, any row/column partition with q parts); `b_stack` is stacked vertically.
// Output: rows follow a's row partition; columns are split into w*c*q slices, slice
// h*q + j of row class i owned by grid (i, j, h mod c).
DistMatrix streaming_mm(const DistMatrix& a, std::span<const DistMatrix* const> b_stack,
                        const StreamingOptions& opts = {});
DistMatrix streaming_mm(const DistMatrix& a, const DistMatrix& b, const StreamingOptions& opts = {});

// Memory bound of Lemma 3 for the given shape: mn/q^2 + (mk + nk)/(w q c).
double streaming_memory_bound(Index m, Index n, Index k, int q, int c, int w);

}  // namespace bspeig::par
