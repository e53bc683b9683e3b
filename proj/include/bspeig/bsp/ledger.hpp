#pragma once

#include <cstdint>
#include <vector>

namespace bspeig::bsp {

struct MachineParams {
  int p = 1;
  std::int64_t memory_words = std::int64_t{1} << 24;  // M
  std::int64_t cache_words = std::int64_t{1} << 15;   // H
  double gamma = 1.0;
  double beta = 10.0;
  double nu = 2.0;
  double alpha = 1000.0;

  // Throws InvalidArgument on a malformed machine.
  void validate() const;
  bool bandwidth_dominates_vertical() const { return beta >= nu; }
  bool cache_reuse_holds() const;
};

struct Counters {
  std::int64_t flops = 0;
  std::int64_t words = 0;     // sent + received
  std::int64_t vertical = 0;  // memory <-> cache
  std::int64_t sent = 0;
  std::int64_t received = 0;

  Counters& operator+=(const Counters& o);
  bool zero() const { return flops == 0 && words == 0 && vertical == 0; }
  bool operator==(const Counters&) const = default;
};

struct SuperstepRecord {
  std::vector<Counters> procs;

  Counters max() const;  // per-field maximum over processors
  bool operator==(const SuperstepRecord&) const = default;
};

struct CostTotals {
  std::int64_t F = 0;
  std::int64_t W = 0;
  std::int64_t Q = 0;
  std::int64_t S = 0;
  bool operator==(const CostTotals&) const = default;
};

class CostLedger {
 public:
  CostLedger() = default;
  explicit CostLedger(int p) : p_(p) {}

  int procs() const { return p_; }
  void append(SuperstepRecord step);
  // Concatenates the other ledger's supersteps after ours.
  void extend(const CostLedger& other);
  CostLedger slice(std::size_t begin, std::size_t end) const;

  const std::vector<SuperstepRecord>& steps() const { return steps_; }
  const CostTotals& totals() const { return totals_; }
  std::int64_t F() const { return totals_.F; }
  std::int64_t W() const { return totals_.W; }
  std::int64_t Q() const { return totals_.Q; }
  std::int64_t S() const { return totals_.S; }
  double model_time(const MachineParams& m) const;

  // Totals recomputed from the records.
  CostTotals recompute() const;
  bool consistent() const { return recompute() == totals_; }
  // Words sent equal words received in every superstep.
  bool conserves_words() const;

  bool operator==(const CostLedger&) const = default;

 private:
  int p_ = 1;
  std::vector<SuperstepRecord> steps_;
  CostTotals totals_;
};

double model_time(const CostTotals& t, const MachineParams& m);

}  // namespace bspeig::bsp
