#include <atomic>
#include <cstdlib>
#include <string>

#include "bspeig/simd.hpp"

namespace bspeig::simd {

namespace {

void gemm_scalar(ConstMatrixView a, ConstMatrixView b, MatrixView c, double alpha) {
  for (Index i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    for (Index k = 0; k < a.cols; ++k) {
      const double aik = alpha * a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (Index j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
    }
  }
}

double dot_scalar(const double* x, const double* y, Index n) {
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, Index n) {
  for (Index i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rot_scalar(double* x, double* y, Index n, double c, double s) {
  for (Index i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

const KernelTable kScalar{Isa::scalar, gemm_scalar, dot_scalar, axpy_scalar, rot_scalar};

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable& pick_default() {
  if (const char* env = std::getenv("BSPEIG_ISA")) {
    const Isa want = parse_isa(env);
    if (want == Isa::avx2 && avx2_kernels() && cpu_supports(Isa::avx2)) return *avx2_kernels();
    return kScalar;
  }
  if (avx2_kernels() && cpu_supports(Isa::avx2)) return *avx2_kernels();
  return kScalar;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = &pick_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_active(Isa isa) {
  if (isa == Isa::scalar) {
    g_active.store(&kScalar);
    return;
  }
  if (!avx2_kernels() || !cpu_supports(isa)) throw InvalidArgument("ISA not available: avx2");
  g_active.store(avx2_kernels());
}

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view s) {
  if (s == "scalar") return Isa::scalar;
  if (s == "avx2") return Isa::avx2;
  throw InvalidArgument("unknown ISA '" + std::string(s) + "'");
}

}  // namespace bspeig::simd
