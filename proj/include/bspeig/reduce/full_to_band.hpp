#pragma once

#include <optional>

#include "bspeig/bsp/layout.hpp"
#include "bspeig/reduce/band_store.hpp"

namespace bspeig::reduce {

// Pending symmetric update U V^T + V U^T, both n x m and replicated cyclically on the grid.
struct AggregatedUpdate {
  DistMatrix u;
  DistMatrix v;
};

struct FullToBandOptions {
  Index b = 0;
  int w = 0;  // streaming rounds; 0 picks max(1, b p^(2 - 3 delta) / n)
  int z = 0;  // QR subgrid width; 0 picks (b p^delta / n)^((1 - delta) / delta)
};

// Parameters resolved for one call, exposed for tests and reports.
struct FullToBandPlan {
  Index n = 0;
  Index b = 0;
  int q = 1;
  int c = 1;
  int z = 1;
  int w = 1;
  int v = 1;  // rounds of the small multiplies
  bool in_range = true;  // n / p^delta <= b <= n / log2 p
};

FullToBandPlan plan_full_to_band(Index n, const bsp::ProcGrid& grid, const FullToBandOptions& opts);

// Reduces A + U V^T + V U^T (A symmetric, in any layout) to a band of width b with the
// same eigenvalues. Requires n mod b = 0 and b mod q = 0. The result's columns are
// blocked over the grid's processors.
DistBand full_to_band(const DistMatrix& a, const bsp::ProcGrid& grid, const FullToBandOptions& opts,
                      const AggregatedUpdate* update = nullptr);

}  // namespace bspeig::reduce
