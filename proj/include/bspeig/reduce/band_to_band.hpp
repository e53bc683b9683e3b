#pragma once

#include <span>

#include "bspeig/reduce/band_store.hpp"

namespace bspeig::reduce {

struct BandToBandPlan {
  Index n = 0;
  Index b = 0;
  Index h = 0;
  int k = 2;
  int groups = 0;      // n / b
  int group_size = 0;  // p b / n processors chase one column block
  int qr_size = 0;     // QR subset of a group: p b / (n k^zeta), power of two
  int v = 1;
  double delta = 0.5;
};

BandToBandPlan plan_band_to_band(Index n, Index b, int p, int k, double delta);

// Reduces bandwidth b to b / k by pipelined bulge chasing. Group j of p b / n processors
// runs every chase (., j); chases of phase 3(i-1)+j run concurrently.
DistBand band_to_band(const DistBand& band, std::span<const int> procs, int k = 2, double delta = 0.5);

}  // namespace bspeig::reduce
