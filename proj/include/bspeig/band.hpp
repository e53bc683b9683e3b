#pragma once

#include <vector>

#include "bspeig/matrix.hpp"
#include "bspeig/meter.hpp"

namespace bspeig {

// Symmetric band matrix stored as diagonals: diag(d, j) = A(j + d, j), d = 0..b.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(Index n, Index b);
  // Keeps the lower band of a (which must be symmetric to the caller's satisfaction).
  static BandMatrix from_dense(const Matrix& a, Index b);

  Index n() const { return n_; }
  Index bandwidth() const { return b_; }

  double get(Index i, Index j) const;
  // |i - j| <= b required.
  void set(Index i, Index j, double v);
  double& diag(Index d, Index j) { return d_(d, j); }
  double diag(Index d, Index j) const { return d_(d, j); }

  Matrix to_dense() const;
  // Largest |A(i,j)| with |i-j| > b in a dense matrix.
  static double out_of_band(const Matrix& a, Index b);
  double frobenius() const;

 private:
  Index n_ = 0;
  Index b_ = 0;
  Matrix d_;  // (b+1) x n
};

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;
};

// Givens bulge chasing, one bandwidth at a time.
Tridiagonal band_to_tridiagonal_seq(const BandMatrix& b, const Meter& meter = {});

// Implicit-shift QL/QR with Wilkinson shifts; ascending eigenvalues.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag,
                                            const Meter& meter = {});

}  // namespace bspeig
