#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bspeig/band.hpp"
#include "bspeig/bsp/engine.hpp"
#include "bspeig/matrix.hpp"

namespace bspeig {

enum class StageKind { full_to_band, band_to_band, ca_br, sequential };

const char* stage_name(StageKind kind);

struct Stage {
  StageKind kind = StageKind::full_to_band;
  Index b_in = 0;
  Index b_out = 0;
  int procs = 1;
  bool operator==(const Stage&) const = default;
};

struct ReductionSchedule {
  Index n = 0;
  int p = 1;
  double delta = 0.5;
  int k = 2;
  double zeta = 1.0;
  Index b = 0;  // bandwidth after full-to-band
  std::vector<Stage> stages;
  Index final_b = 0;
};

// b is the largest power-of-two divisor of n not above n / max(p^(2-3 delta), log2 p).
// Band-to-band halvings run while b > n / p^delta on p / 2^(i zeta) processors, then
// CA-BR halvings on p^delta processors while b > n / p. p must be a power of two.
ReductionSchedule choose_schedule(Index n, int p, double delta);

struct StageRecord {
  Stage stage;
  bsp::CostLedger ledger;
};

struct SolverOptions {
  double delta = 0.5;
  bsp::MachineParams machine;  // machine.p is overwritten by the processor count
  bsp::MemoryPolicy memory = bsp::MemoryPolicy::warn;
  // Called after every reduction stage with the (unmetered) gathered band, padding included.
  std::function<void(const StageRecord&, const BandMatrix&)> on_stage;
};

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  bsp::CostLedger ledger;
  std::vector<StageRecord> stages;
  ReductionSchedule schedule;
  Index padding = 0;
  int procs = 1;
  std::vector<std::string> notes;
};

// Eigenvalues of symmetric a on p simulated processors (rounded down to a power of two).
// n is padded to a multiple of p with an identity block whose eigenvalues are removed.
EigenResult symmetric_eigenvalues(const Matrix& a, int p, const SolverOptions& opts = {});

}  // namespace bspeig
