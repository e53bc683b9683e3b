#pragma once

#include <span>

#include "bspeig/band.hpp"
#include "bspeig/bsp/dist_matrix.hpp"

namespace bspeig::reduce {

using bsp::DistMatrix;

// Symmetric band held as its lower diagonals: store(d, j) = B(j + d, j), a (b+1) x n
// matrix whose columns are split into contiguous blocks over the processors.
class DistBand {
 public:
  DistBand(bsp::Engine& engine, Index n, Index b, std::span<const int> procs);
  // Unmetered placement of an existing band.
  static DistBand place(bsp::Engine& engine, const BandMatrix& band, std::span<const int> procs);

  Index n() const { return n_; }
  Index bandwidth() const { return b_; }
  DistMatrix& store() { return store_; }
  const DistMatrix& store() const { return store_; }
  std::vector<int> procs() const { return store_.procs(); }

  BandMatrix gather() const;

 private:
  Index n_;
  Index b_;
  DistMatrix store_;
};

// Moves a band onto one processor (one superstep unless it is already there).
BandMatrix gather_band(const DistBand& band, int root);

}  // namespace bspeig::reduce
