#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

// Reference eigenvalues by cyclic Jacobi rotations. Self-contained on purpose: it takes a
// plain row-major array so that no solver type or routine is involved.
namespace oracle {

class JacobiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JacobiResult {
  std::vector<double> eigenvalues;  // ascending
  int sweeps = 0;
  double off_norm = 0.0;
};

// a holds n*n entries, row-major; must be symmetric to 1e-12 relative.
JacobiResult jacobi_eigenvalues(std::span<const double> a, std::size_t n, int max_sweeps = 100);

}  // namespace oracle
