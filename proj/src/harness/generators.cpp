#include "bspeig/harness/generators.hpp"

#include <random>

#include "bspeig/errors.hpp"

namespace bspeig::harness {

Matrix random_symmetric(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix g(n, n);
  // 53 random bits mapped to [-1, 1); spelled out so the stream is the same everywhere.
  for (double& v : g.values()) v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = 0.5 * (g(i, j) + g(j, i));
  return a;
}

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"random", "diag", "laplacian", "ones"};
  return names;
}

Matrix generate(const std::string& name, Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("generator: n must be positive");
  if (name == "random") return random_symmetric(n, seed);
  Matrix a(n, n);
  if (name == "diag") {
    for (Index i = 0; i < n; ++i) a(i, i) = static_cast<double>(i + 1);
  } else if (name == "laplacian") {
    for (Index i = 0; i < n; ++i) {
      a(i, i) = 2.0;
      if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
    }
  } else if (name == "ones") {
    for (double& v : a.values()) v = 1.0;
  } else {
    throw InvalidArgument("unknown generator '" + name + "'");
  }
  return a;
}

}  // namespace bspeig::harness
