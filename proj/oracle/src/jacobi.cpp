#include "oracle/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace oracle {

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

}  // namespace

JacobiResult jacobi_eigenvalues(std::span<const double> input, std::size_t n, int max_sweeps) {
  if (input.size() != n * n) throw JacobiError("jacobi: expected n*n entries");
  std::vector<double> a(input.begin(), input.end());

  double fro = 0.0;
  for (double v : a) fro += v * v;
  fro = std::sqrt(fro);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a[i * n + j] - a[j * n + i]) > 1e-12 * std::max(fro, 1e-300))
        throw JacobiError("jacobi: matrix is not symmetric");

  const double eps = std::numeric_limits<double>::epsilon();
  JacobiResult res;
  double off = off_diagonal_norm(a, n);
  while (off > eps * fro && fro > 0.0) {
    if (res.sweeps == max_sweeps)
      throw JacobiError("jacobi: no convergence after " + std::to_string(max_sweeps) + " sweeps");
    ++res.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        // Rutishauser's formulas for the annihilating rotation.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
      }
    off = off_diagonal_norm(a, n);
  }
  res.off_norm = off;
  res.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.eigenvalues[i] = a[i * n + i];
  std::sort(res.eigenvalues.begin(), res.eigenvalues.end());
  return res;
}

}  // namespace oracle
