#pragma once

#include <span>
#include <vector>

#include "bspeig/reduce/band_store.hpp"
#include "bspeig/reduce/bulge.hpp"

namespace bspeig::reduce {

struct ScheduledChase {
  Chase chase;
  int proc = 0;  // index into the processor list
  int step = 0;
};

// Greedy pipeline for halving bandwidth b: each chase runs on the owner of its first QR
// column, at the earliest step after every earlier chase sharing an index with it (same
// step when that chase ran on the same processor).
std::vector<ScheduledChase> ca_br_schedule(Index n, Index b, int p);

// Halves the bandwidth on procs, each holding a contiguous block of columns. b = 1 is
// returned unchanged.
DistBand ca_br_halve(const DistBand& band, std::span<const int> procs);

}  // namespace bspeig::reduce
