#pragma once

#include <span>
#include <vector>

#include "bspeig/bsp/dist_matrix.hpp"
#include "bspeig/kernels.hpp"

namespace bspeig::par {

using bsp::DistMatrix;

// Shape of the QR reduction tree at one node.
struct QrTreePlan {
  Index m = 0;
  Index n = 0;
  int p = 1;
  int r = 1;      // pieces the rows are split into
  int q_max = 1;  // processor cap for the near-square base case
  double delta = 0.5;

  static QrTreePlan make(Index m, Index n, int p, double delta);
  bool leaf() const { return p == 1 || m <= 2 * n; }
};

// Explicit thin QR. q keeps the row order of the input, split into row blocks over the
// processors; r is n x n upper triangular on the first processor.
struct ParQr {
  DistMatrix q;
  DistMatrix r;
};

// U is laid out like the Q it came from; T sits on the first processor.
// E - U T U1^T = Q diag(signs).
struct DistHouseholder {
  DistMatrix u;
  DistMatrix t;
  std::vector<double> signs;

  HouseholderFactor gather() const { return {u.gather(), t.gather()}; }
};

struct HouseholderQr {
  DistHouseholder factor;
  DistMatrix r;  // diag(signs) R, so A = (E - U T U1^T) r
};

// Tree QR of an m x n matrix (m >= n). Rows are padded with zeros up to n times a power
// of two and the processor list is cut to a power of two; padding is stripped from q.
ParQr rect_qr(const DistMatrix& a, std::span<const int> procs, double delta = 0.5);

// Base case for at most 2n rows: panels of about n / sqrt(p) columns, each factored by
// the tree QR, with trailing updates and the final Q built by parallel multiplies.
ParQr square_qr(const DistMatrix& a, std::span<const int> procs, double delta = 0.5);

// (U, T) from an explicit orthonormal Q through an LU of Q1 - S, S chosen during the
// elimination. Throws NumericalError carrying the residual when the result is off.
DistHouseholder householder_reconstruct(const DistMatrix& q, std::span<const int> procs);

HouseholderQr householder_qr(const DistMatrix& a, std::span<const int> procs, double delta = 0.5);

}  // namespace bspeig::par
