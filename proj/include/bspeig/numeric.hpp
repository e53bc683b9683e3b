#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace bspeig {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Largest power of two <= x, tolerant of pow() roundoff (64^(1/3) -> 4). At least 1.
inline std::int64_t pow2_floor(double x) {
  std::int64_t v = 1;
  while (static_cast<double>(v * 2) <= x * (1.0 + 1e-9)) v *= 2;
  return v;
}

// Smallest power of two >= x (tolerant), at least 1.
inline std::int64_t pow2_ceil(double x) {
  std::int64_t v = 1;
  while (static_cast<double>(v) < x * (1.0 - 1e-9)) v *= 2;
  return v;
}

// Power of two nearest to x in log scale.
inline std::int64_t pow2_nearest(double x) {
  if (x <= 1.0) return 1;
  return std::int64_t{1} << static_cast<int>(std::lround(std::log2(x)));
}

inline bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::int64_t v) {
  int l = 0;
  while ((std::int64_t{1} << l) < v) ++l;
  return l;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace bspeig
