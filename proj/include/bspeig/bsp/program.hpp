#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "bspeig/bsp/engine.hpp"
#include "bspeig/errors.hpp"

namespace bspeig::bsp {

// Order in which processor-local steps run inside one superstep. Results must not depend on it.
enum class EvaluationOrder { forward, reverse, shuffled };

// View handed to one processor for one superstep.
template <class State>
class LocalStep {
 public:
  LocalStep(int self, State& state, const std::vector<std::vector<Message>>& inboxes,
            std::vector<Message>& outbox, Engine& engine)
      : self_(self), state_(state), inboxes_(inboxes), outbox_(outbox), engine_(engine) {}

  int self() const { return self_; }
  int procs() const { return engine_.procs(); }
  State& state() { return state_; }
  std::span<const Message> inbox() const { return inboxes_[static_cast<std::size_t>(self_)]; }
  // Only the processor's own inbox is readable.
  std::span<const Message> inbox_of(int proc) const {
    if (proc != self_)
      throw ModelViolation("processor " + std::to_string(self_) + " read the inbox of " +
                           std::to_string(proc));
    return inbox();
  }
  void send(int dst, std::vector<double> payload, int tag = 0) {
    outbox_.push_back(Message{self_, dst, std::move(payload), tag});
  }
  void charge(std::int64_t flops, std::int64_t vertical_words) {
    engine_.charge(self_, flops, vertical_words);
  }

 private:
  int self_;
  State& state_;
  const std::vector<std::vector<Message>>& inboxes_;
  std::vector<Message>& outbox_;
  Engine& engine_;
};

template <class State>
using LocalProgramStep = std::function<void(LocalStep<State>&)>;

// A program is a list of supersteps; every processor runs the same local step function.
template <class State>
using Program = std::vector<LocalProgramStep<State>>;

template <class State>
struct ProgramResult {
  std::vector<State> states;
  CostLedger ledger;
  std::vector<std::string> notes;
};

template <class State>
ProgramResult<State> run_program(const Program<State>& program, std::vector<State> states,
                                 const MachineParams& machine,
                                 EvaluationOrder order = EvaluationOrder::forward,
                                 MemoryPolicy policy = MemoryPolicy::warn, std::uint64_t shuffle_seed = 1) {
  Engine engine(machine, policy);
  if (static_cast<int>(states.size()) != machine.p)
    throw InvalidArgument("run_program: need one initial state per processor");
  std::vector<std::vector<Message>> inboxes(static_cast<std::size_t>(machine.p));
  std::mt19937_64 rng(shuffle_seed);
  std::vector<int> procs(static_cast<std::size_t>(machine.p));
  for (const auto& step : program) {
    std::iota(procs.begin(), procs.end(), 0);
    if (order == EvaluationOrder::reverse) std::reverse(procs.begin(), procs.end());
    if (order == EvaluationOrder::shuffled) std::shuffle(procs.begin(), procs.end(), rng);
    std::vector<std::vector<Message>> outboxes(static_cast<std::size_t>(machine.p));
    for (int p : procs) {
      LocalStep<State> local(p, states[static_cast<std::size_t>(p)], inboxes,
                             outboxes[static_cast<std::size_t>(p)], engine);
      step(local);
    }
    std::vector<Message> all;
    for (auto& box : outboxes)
      for (auto& m : box) all.push_back(std::move(m));
    for (auto& box : inboxes) box.clear();
    for (auto& m : engine.exchange(std::move(all))) inboxes[static_cast<std::size_t>(m.dst)].push_back(std::move(m));
  }
  engine.settle();
  return {std::move(states), engine.ledger(), engine.notes()};
}

// Runs an orchestrated computation on a fresh engine and returns its value with the ledger.
template <class Fn>
auto run_on_machine(const MachineParams& machine, Fn&& fn, MemoryPolicy policy = MemoryPolicy::warn) {
  Engine engine(machine, policy);
  auto value = fn(engine);
  engine.settle();
  return std::pair{std::move(value), engine.ledger()};
}

}  // namespace bspeig::bsp
