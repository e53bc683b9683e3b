#include "bspeig/bsp/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "bspeig/errors.hpp"

namespace bspeig::bsp {

void MachineParams::validate() const {
  if (p < 1) throw InvalidArgument("machine: p must be >= 1");
  if (memory_words < 1) throw InvalidArgument("machine: M must be >= 1");
  if (cache_words < 1) throw InvalidArgument("machine: H must be >= 1");
  if (gamma < 0 || beta < 0 || nu < 0 || alpha < 0)
    throw InvalidArgument("machine: unit costs must be nonnegative");
}

bool MachineParams::cache_reuse_holds() const {
  return gamma * std::sqrt(static_cast<double>(cache_words)) >= nu;
}

Counters& Counters::operator+=(const Counters& o) {
  flops += o.flops;
  words += o.words;
  vertical += o.vertical;
  sent += o.sent;
  received += o.received;
  return *this;
}

Counters SuperstepRecord::max() const {
  Counters m;
  for (const Counters& c : procs) {
    m.flops = std::max(m.flops, c.flops);
    m.words = std::max(m.words, c.words);
    m.vertical = std::max(m.vertical, c.vertical);
    m.sent = std::max(m.sent, c.sent);
    m.received = std::max(m.received, c.received);
  }
  return m;
}

void CostLedger::append(SuperstepRecord step) {
  if (static_cast<int>(step.procs.size()) != p_)
    throw InvalidArgument("ledger: superstep record has wrong processor count");
  const Counters m = step.max();
  totals_.F += m.flops;
  totals_.W += m.words;
  totals_.Q += m.vertical;
  totals_.S += 1;
  steps_.push_back(std::move(step));
}

void CostLedger::extend(const CostLedger& other) {
  for (const SuperstepRecord& s : other.steps_) append(s);
}

CostLedger CostLedger::slice(std::size_t begin, std::size_t end) const {
  CostLedger out(p_);
  end = std::min(end, steps_.size());
  for (std::size_t i = begin; i < end; ++i) out.append(steps_[i]);
  return out;
}

double CostLedger::model_time(const MachineParams& m) const { return bsp::model_time(totals_, m); }

CostTotals CostLedger::recompute() const {
  CostTotals t;
  for (const SuperstepRecord& s : steps_) {
    const Counters m = s.max();
    t.F += m.flops;
    t.W += m.words;
    t.Q += m.vertical;
    t.S += 1;
  }
  return t;
}

bool CostLedger::conserves_words() const {
  for (const SuperstepRecord& s : steps_) {
    std::int64_t sent = 0, received = 0;
    for (const Counters& c : s.procs) {
      sent += c.sent;
      received += c.received;
    }
    if (sent != received) return false;
  }
  return true;
}

double model_time(const CostTotals& t, const MachineParams& m) {
  return m.gamma * static_cast<double>(t.F) + m.beta * static_cast<double>(t.W) +
         m.nu * static_cast<double>(t.Q) + m.alpha * static_cast<double>(t.S);
}

}  // namespace bspeig::bsp
