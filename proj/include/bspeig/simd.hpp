#pragma once

#include <string_view>

#include "bspeig/matrix.hpp"

namespace bspeig::simd {

enum class Isa { scalar, avx2 };

// Inner loops with a scalar reference and vector variants.
struct KernelTable {
  Isa isa;
  // c += alpha * a * b
  void (*gemm)(ConstMatrixView a, ConstMatrixView b, MatrixView c, double alpha);
  double (*dot)(const double* x, const double* y, Index n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, Index n);
  // (x, y) <- (c x + s y, c y - s x)
  void (*rot)(double* x, double* y, Index n, double c, double s);
};

const KernelTable& scalar_kernels();
// Null when the binary was built without the variant.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);
// Honors BSPEIG_ISA=scalar|avx2 on first use, otherwise picks the best supported.
const KernelTable& active();
void set_active(Isa isa);

std::string_view name(Isa isa);
Isa parse_isa(std::string_view s);

}  // namespace bspeig::simd
