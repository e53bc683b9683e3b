#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bspeig/matrix.hpp"
#include "oracle/jacobi.hpp"

namespace testing {

using bspeig::Index;
using bspeig::Matrix;

inline Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = u(rng);
  return a;
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  Matrix g = random_matrix(n, n, seed);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = 0.5 * (g(i, j) + g(j, i));
  return a;
}

inline Matrix random_banded(Index n, Index b, std::uint64_t seed) {
  Matrix a = random_symmetric(n, seed);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(i - j) > b) a(i, j) = 0.0;
  return a;
}

inline std::vector<double> oracle_eigs(const Matrix& a) {
  return oracle::jacobi_eigenvalues(a.values(), static_cast<std::size_t>(a.rows())).eigenvalues;
}

// ||A||_2 of a symmetric matrix through the oracle spectrum.
inline double spectral_norm(const Matrix& a) {
  const auto e = oracle_eigs(a);
  return e.empty() ? 0.0 : std::max(std::abs(e.front()), std::abs(e.back()));
}

inline double max_delta(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return x.size() == y.size() ? d : INFINITY;
}

}  // namespace testing
