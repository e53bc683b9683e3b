// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "bspeig/simd.hpp"

#if defined(BSPEIG_HAVE_AVX2)
#include <immintrin.h>

namespace bspeig::simd {

namespace {

void gemm_avx2(ConstMatrixView a, ConstMatrixView b, MatrixView c, double alpha) {
  const Index n = b.cols;
  const Index n4 = n & ~Index{3};
  for (Index i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    for (Index k = 0; k < a.cols; ++k) {
      const double aik = alpha * a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      const __m256d va = _mm256_set1_pd(aik);
      Index j = 0;
      for (; j < n4; j += 4) {
        __m256d vc = _mm256_loadu_pd(ci + j);
        vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(bk + j), vc);
        _mm256_storeu_pd(ci + j, vc);
      }
      for (; j < n; ++j) ci[j] = __builtin_fma(aik, bk[j], ci[j]);
    }
  }
}

double dot_avx2(const double* x, const double* y, Index n) {
  __m256d acc = _mm256_setzero_pd();
  Index i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s = __builtin_fma(x[i], y[i], s);
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, Index n) {
  const __m256d va = _mm256_set1_pd(alpha);
  Index i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = __builtin_fma(alpha, x[i], y[i]);
}

void rot_avx2(double* x, double* y, Index n, double c, double s) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  Index i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(vc, xi, _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_fmsub_pd(vc, yi, _mm256_mul_pd(vs, xi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = __builtin_fma(c, xi, s * yi);
    y[i] = __builtin_fma(c, yi, -(s * xi));
  }
}

const KernelTable kAvx2{Isa::avx2, gemm_avx2, dot_avx2, axpy_avx2, rot_avx2};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace bspeig::simd

#else

namespace bspeig::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace bspeig::simd

#endif
