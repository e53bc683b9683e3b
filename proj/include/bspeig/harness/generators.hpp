#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bspeig/matrix.hpp"

namespace bspeig::harness {

// (G + G^T) / 2 with G uniform(-1, 1) from mt19937_64(seed), filled row-major.
Matrix random_symmetric(Index n, std::uint64_t seed);

// Named test matrices with known spectra:
//   random     random_symmetric(n, seed)
//   diag       diag(1, ..., n)
//   laplacian  tridiag(-1, 2, -1), eigenvalues 2 - 2 cos(k pi / (n + 1))
//   ones       all ones, eigenvalues n and 0
Matrix generate(const std::string& name, Index n, std::uint64_t seed);
const std::vector<std::string>& generator_names();

}  // namespace bspeig::harness
