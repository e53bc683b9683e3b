#include <doctest.h>

#include <cmath>

#include "oracle/jacobi.hpp"

TEST_CASE("jacobi spec examples") {
  auto e = oracle::jacobi_eigenvalues(std::vector<double>{3, 0, 0, 0, 1, 0, 0, 0, 2}, 3).eigenvalues;
  CHECK(e == std::vector<double>{1, 2, 3});
  e = oracle::jacobi_eigenvalues(std::vector<double>{2, 1, 1, 2}, 2).eigenvalues;
  CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e[1] == doctest::Approx(3.0).epsilon(1e-14));
  e = oracle::jacobi_eigenvalues(std::vector<double>(16, 0.0), 4).eigenvalues;
  CHECK(e == std::vector<double>(4, 0.0));
}

TEST_CASE("jacobi closed form") {
  const std::size_t n = 12;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = 2.0;
    if (i + 1 < n) a[i * n + i + 1] = a[(i + 1) * n + i] = -1.0;
  }
  const auto e = oracle::jacobi_eigenvalues(a, n).eigenvalues;
  for (std::size_t k = 1; k <= n; ++k)
    CHECK(e[k - 1] == doctest::Approx(2.0 - 2.0 * std::cos(static_cast<double>(k) * M_PI / (n + 1))).epsilon(1e-12));
}

TEST_CASE("jacobi rejects asymmetric input") {
  CHECK_THROWS_AS(oracle::jacobi_eigenvalues(std::vector<double>{1, 2, 0, 1}, 2), oracle::JacobiError);
}
