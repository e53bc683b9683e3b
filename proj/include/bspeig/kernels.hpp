#pragma once

#include <vector>

#include "bspeig/matrix.hpp"
#include "bspeig/meter.hpp"

namespace bspeig {

// Q_thin = E - U T U1^T with U m x n unit lower trapezoidal and T n x n upper triangular.
struct HouseholderFactor {
  Matrix u;
  Matrix t;
};

struct QrResult {
  HouseholderFactor factor;
  Matrix r;  // n x n upper triangular
};

// C = A B; F = 2mnk and the analytic Q rule are charged to the meter.
Matrix local_matmul(ConstMatrixView a, ConstMatrixView b, const Meter& meter = {});
// c += alpha A B
void local_matmul_acc(ConstMatrixView a, ConstMatrixView b, MatrixView c, double alpha, const Meter& meter = {});

// Blocked Householder QR in compact WY form. Reflectors always map a column to
// -sign(alpha)|x| e1, so every T diagonal lies in [1, 2] and T is invertible.
QrResult local_qr(ConstMatrixView a, const Meter& meter = {});

// E - U T U1^T, m x n.
Matrix explicit_q(const HouseholderFactor& f, const Meter& meter = {});
// Applies Q^T = (I - U T U^T)^T to the rows of c in place (c has m rows).
void apply_qt(const HouseholderFactor& f, MatrixView c, const Meter& meter = {});

struct LuFactors {
  Matrix l;      // unit lower triangular
  Matrix u;      // upper triangular
  Matrix l_inv;
  Matrix u_inv;
  std::vector<double> signs;  // diagonal of S
};

// L U = Q1 - S for a given diagonal sign vector. Throws NumericalError on a zero pivot.
LuFactors lu_nopivot_shifted(ConstMatrixView q1, const std::vector<double>& signs, const Meter& meter = {});
// Same, choosing S_kk = -sign(current pivot) while eliminating, which keeps |pivot| >= 1.
LuFactors lu_nopivot_adaptive(ConstMatrixView q1, const Meter& meter = {});

Matrix invert_lower_unit(ConstMatrixView l, const Meter& meter = {});
Matrix invert_upper(ConstMatrixView u, const Meter& meter = {});

// ||U^T U - T^-1 - T^-T||_F
double householder_identity_residual(const HouseholderFactor& f);
// ||Q^T Q - I||_F
double orthogonality_residual(ConstMatrixView q);

}  // namespace bspeig
