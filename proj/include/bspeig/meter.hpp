#pragma once

#include <cstdint>

namespace bspeig {

namespace bsp {
class Engine;
}

// Charges local work of one processor. A default-constructed meter charges nothing.
class Meter {
 public:
  Meter() = default;
  Meter(bsp::Engine& engine, int proc) : engine_(&engine), proc_(proc) {}

  bool active() const { return engine_ != nullptr; }
  int proc() const { return proc_; }
  bsp::Engine* engine() const { return engine_; }

  void charge(std::int64_t flops, std::int64_t vertical_words) const;
  std::int64_t cache_words() const;

  // F = 2mnk; Q = mn+mk+nk when that exceeds H.
  void matmul(std::int64_t m, std::int64_t n, std::int64_t k) const;
  // F = 2mn^2; Q = mn when mn exceeds H.
  void qr(std::int64_t m, std::int64_t n) const;
  // Elementwise pass over `words` entries touching `operands` arrays.
  void elementwise(std::int64_t words, std::int64_t flops_per_word, int operands = 2) const;
  // Streaming multiply with a cache-resident operand a_words when it fits.
  void streaming_matmul(std::int64_t m, std::int64_t n, std::int64_t k) const;

 private:
  bsp::Engine* engine_ = nullptr;
  int proc_ = 0;
};

}  // namespace bspeig
