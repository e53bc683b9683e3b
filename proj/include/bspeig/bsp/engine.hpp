#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bspeig/bsp/ledger.hpp"

namespace bspeig::bsp {

struct Message {
  int src = 0;
  int dst = 0;
  std::vector<double> payload;
  int tag = 0;
};

enum class MemoryPolicy { warn, strict };

class Engine;

// RAII record of words held by one processor.
class MemoryLease {
 public:
  MemoryLease() = default;
  MemoryLease(Engine& engine, int proc, std::int64_t words);
  MemoryLease(MemoryLease&& o) noexcept;
  MemoryLease& operator=(MemoryLease&& o) noexcept;
  MemoryLease(const MemoryLease&) = delete;
  MemoryLease& operator=(const MemoryLease&) = delete;
  ~MemoryLease();

  std::int64_t words() const { return words_; }
  int proc() const { return proc_; }
  void release();

 private:
  Engine* engine_ = nullptr;
  int proc_ = 0;
  std::int64_t words_ = 0;
};

// Single-threaded simulator of a p-processor BSP machine. Work is charged into the
// open superstep; exchange() delivers messages and closes it.
class Engine {
 public:
  explicit Engine(MachineParams params, MemoryPolicy policy = MemoryPolicy::warn);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const MachineParams& params() const { return params_; }
  int procs() const { return params_.p; }
  MemoryPolicy memory_policy() const { return policy_; }

  void charge(int proc, std::int64_t flops, std::int64_t vertical_words);

  // Delivers every message, charges W at both endpoints (self-sends are free) and
  // closes the superstep. Returned messages are ordered by (dst, src, tag, post order).
  std::vector<Message> exchange(std::vector<Message> outbox);

  // Runs branches on disjoint processor groups; their supersteps are aligned and merged.
  void concurrently(int branches, const std::function<void(int)>& body);

  // Closes pending local work: merged into the last superstep if there is one in the
  // current scope, otherwise recorded as a superstep of its own.
  void settle();

  // Closed supersteps so far (pending local work excluded).
  std::size_t closed_steps() const;
  // Snapshot of the finished ledger, with pending work settled as settle() would.
  CostLedger ledger() const;

  // Memory tracking.
  void acquire(int proc, std::int64_t words);
  void release(int proc, std::int64_t words);
  std::int64_t live_words(int proc) const { return live_.at(static_cast<std::size_t>(proc)); }
  std::int64_t peak_words(int proc) const { return peak_.at(static_cast<std::size_t>(proc)); }
  std::int64_t max_peak_words() const;
  void reset_peaks();

  // Warnings and adopted-rule notes gathered during the run.
  void note(std::string text);
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  struct Recorder {
    std::vector<SuperstepRecord> closed;
    SuperstepRecord open;
    bool open_dirty = false;
  };

  void check_proc(int proc, const char* what) const;
  SuperstepRecord blank() const;
  static void accumulate(SuperstepRecord& into, const SuperstepRecord& from);

  MachineParams params_;
  MemoryPolicy policy_;
  std::vector<Recorder> scopes_;  // stack; front() is the run, back() is current
  std::vector<std::int64_t> live_;
  std::vector<std::int64_t> peak_;
  std::vector<std::string> notes_;
  bool memory_warned_ = false;
};

}  // namespace bspeig::bsp
