#include "bspeig/bsp/engine.hpp"

#include <algorithm>
#include <numeric>

#include "bspeig/errors.hpp"
#include "bspeig/meter.hpp"

namespace bspeig::bsp {

MemoryLease::MemoryLease(Engine& engine, int proc, std::int64_t words)
    : engine_(&engine), proc_(proc), words_(words) {
  engine.acquire(proc, words);
}

MemoryLease::MemoryLease(MemoryLease&& o) noexcept
    : engine_(o.engine_), proc_(o.proc_), words_(o.words_) {
  o.engine_ = nullptr;
  o.words_ = 0;
}

MemoryLease& MemoryLease::operator=(MemoryLease&& o) noexcept {
  if (this != &o) {
    release();
    engine_ = o.engine_;
    proc_ = o.proc_;
    words_ = o.words_;
    o.engine_ = nullptr;
    o.words_ = 0;
  }
  return *this;
}

MemoryLease::~MemoryLease() { release(); }

void MemoryLease::release() {
  if (engine_ && words_ > 0) engine_->release(proc_, words_);
  engine_ = nullptr;
  words_ = 0;
}

Engine::Engine(MachineParams params, MemoryPolicy policy) : params_(params), policy_(policy) {
  params_.validate();
  scopes_.push_back(Recorder{{}, blank(), false});
  live_.assign(static_cast<std::size_t>(params_.p), 0);
  peak_.assign(static_cast<std::size_t>(params_.p), 0);
}

SuperstepRecord Engine::blank() const {
  return SuperstepRecord{std::vector<Counters>(static_cast<std::size_t>(params_.p))};
}

void Engine::check_proc(int proc, const char* what) const {
  if (proc < 0 || proc >= params_.p)
    throw ModelViolation(std::string(what) + ": processor " + std::to_string(proc) +
                         " outside machine of " + std::to_string(params_.p));
}

void Engine::accumulate(SuperstepRecord& into, const SuperstepRecord& from) {
  for (std::size_t i = 0; i < into.procs.size(); ++i) into.procs[i] += from.procs[i];
}

void Engine::charge(int proc, std::int64_t flops, std::int64_t vertical_words) {
  check_proc(proc, "charge");
  if (flops < 0 || vertical_words < 0) throw InvalidArgument("charge: negative cost");
  if (flops == 0 && vertical_words == 0) return;
  Recorder& r = scopes_.back();
  Counters& c = r.open.procs[static_cast<std::size_t>(proc)];
  c.flops += flops;
  c.vertical += vertical_words;
  r.open_dirty = true;
}

std::vector<Message> Engine::exchange(std::vector<Message> outbox) {
  Recorder& r = scopes_.back();
  for (const Message& m : outbox) {
    check_proc(m.src, "exchange source");
    check_proc(m.dst, "exchange destination");
    if (m.src == m.dst) continue;
    const auto words = static_cast<std::int64_t>(m.payload.size());
    Counters& s = r.open.procs[static_cast<std::size_t>(m.src)];
    Counters& d = r.open.procs[static_cast<std::size_t>(m.dst)];
    s.words += words;
    s.sent += words;
    d.words += words;
    d.received += words;
  }
  r.closed.push_back(std::move(r.open));
  r.open = blank();
  r.open_dirty = false;

  std::vector<std::size_t> order(outbox.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Message& x = outbox[a];
    const Message& y = outbox[b];
    if (x.dst != y.dst) return x.dst < y.dst;
    if (x.src != y.src) return x.src < y.src;
    return x.tag < y.tag;
  });
  std::vector<Message> delivered;
  delivered.reserve(outbox.size());
  for (std::size_t i : order) delivered.push_back(std::move(outbox[i]));
  return delivered;
}

void Engine::concurrently(int branches, const std::function<void(int)>& body) {
  if (branches <= 0) return;
  std::vector<Recorder> done;
  done.reserve(static_cast<std::size_t>(branches));
  for (int b = 0; b < branches; ++b) {
    scopes_.push_back(Recorder{{}, blank(), false});
    try {
      body(b);
    } catch (...) {
      scopes_.pop_back();
      throw;
    }
    done.push_back(std::move(scopes_.back()));
    scopes_.pop_back();
  }

  Recorder& parent = scopes_.back();
  std::size_t k_max = 0;
  for (const Recorder& d : done) k_max = std::max(k_max, d.closed.size());

  if (k_max == 0) {
    for (const Recorder& d : done) {
      if (!d.open_dirty) continue;
      accumulate(parent.open, d.open);
      parent.open_dirty = true;
    }
    return;
  }

  std::vector<SuperstepRecord> combined(k_max, blank());
  SuperstepRecord trailing = blank();
  bool trailing_dirty = false;
  for (const Recorder& d : done) {
    for (std::size_t i = 0; i < d.closed.size(); ++i) accumulate(combined[i], d.closed[i]);
    if (!d.open_dirty) continue;
    if (d.closed.size() < k_max) {
      accumulate(combined[d.closed.size()], d.open);
    } else {
      accumulate(trailing, d.open);
      trailing_dirty = true;
    }
  }
  accumulate(combined[0], parent.open);
  for (SuperstepRecord& s : combined) parent.closed.push_back(std::move(s));
  parent.open = std::move(trailing);
  parent.open_dirty = trailing_dirty;
}

void Engine::settle() {
  Recorder& r = scopes_.back();
  if (!r.open_dirty) return;
  if (r.closed.empty()) {
    r.closed.push_back(std::move(r.open));
  } else {
    accumulate(r.closed.back(), r.open);
  }
  r.open = blank();
  r.open_dirty = false;
}

std::size_t Engine::closed_steps() const { return scopes_.back().closed.size(); }

CostLedger Engine::ledger() const {
  if (scopes_.size() != 1) throw ModelViolation("ledger requested inside a concurrent branch");
  const Recorder& r = scopes_.front();
  CostLedger out(params_.p);
  for (std::size_t i = 0; i < r.closed.size(); ++i) {
    if (r.open_dirty && i + 1 == r.closed.size()) {
      SuperstepRecord last = r.closed[i];
      accumulate(last, r.open);
      out.append(std::move(last));
    } else {
      out.append(r.closed[i]);
    }
  }
  if (r.open_dirty && r.closed.empty()) out.append(r.open);
  return out;
}

void Engine::acquire(int proc, std::int64_t words) {
  check_proc(proc, "memory lease");
  if (words < 0) throw InvalidArgument("memory lease: negative size");
  auto& live = live_[static_cast<std::size_t>(proc)];
  live += words;
  auto& peak = peak_[static_cast<std::size_t>(proc)];
  peak = std::max(peak, live);
  if (live > params_.memory_words) {
    const std::string msg = "processor " + std::to_string(proc) + " holds " + std::to_string(live) +
                            " words, above M = " + std::to_string(params_.memory_words);
    if (policy_ == MemoryPolicy::strict) {
      live -= words;
      throw ModelViolation("memory limit exceeded: " + msg);
    }
    if (!memory_warned_) {
      memory_warned_ = true;
      note("warning: memory limit exceeded: " + msg);
    }
  }
}

void Engine::release(int proc, std::int64_t words) {
  check_proc(proc, "memory release");
  live_[static_cast<std::size_t>(proc)] -= words;
}

std::int64_t Engine::max_peak_words() const {
  return peak_.empty() ? 0 : *std::max_element(peak_.begin(), peak_.end());
}

void Engine::reset_peaks() { peak_ = live_; }

void Engine::note(std::string text) {
  if (std::find(notes_.begin(), notes_.end(), text) == notes_.end()) notes_.push_back(std::move(text));
}

}  // namespace bspeig::bsp

namespace bspeig {

void Meter::charge(std::int64_t flops, std::int64_t vertical_words) const {
  if (engine_) engine_->charge(proc_, flops, vertical_words);
}

std::int64_t Meter::cache_words() const {
  return engine_ ? engine_->params().cache_words : std::int64_t{1} << 15;
}

void Meter::matmul(std::int64_t m, std::int64_t n, std::int64_t k) const {
  if (!engine_) return;
  const std::int64_t footprint = m * n + m * k + n * k;
  charge(2 * m * n * k, footprint > cache_words() ? footprint : 0);
}

void Meter::qr(std::int64_t m, std::int64_t n) const {
  if (!engine_) return;
  const std::int64_t footprint = m * n;
  charge(2 * m * n * n, footprint > cache_words() ? footprint : 0);
}

void Meter::elementwise(std::int64_t words, std::int64_t flops_per_word, int operands) const {
  if (!engine_) return;
  const std::int64_t footprint = words * operands;
  charge(words * flops_per_word, footprint > cache_words() ? footprint : 0);
}

void Meter::streaming_matmul(std::int64_t m, std::int64_t n, std::int64_t k) const {
  if (!engine_) return;
  const std::int64_t a = m * n;
  const std::int64_t streamed = n * k + m * k;
  std::int64_t q = 0;
  if (a + streamed > cache_words()) q = a <= cache_words() ? streamed : a + streamed;
  charge(2 * m * n * k, q);
}

}  // namespace bspeig
