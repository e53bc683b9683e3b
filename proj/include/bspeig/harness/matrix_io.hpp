#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bspeig/matrix.hpp"

namespace bspeig::harness {

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class MatrixFormat { csv, raw };

// ".csv" selects CSV, anything else the raw binary format.
MatrixFormat format_for_path(const std::string& path);

// Raw: 16-byte header "SYMM", u32 n (LE), u32 reserved, 4 zero bytes; then n*n f64 (LE)
// row-major. Reserved and padding bytes are ignored on read.
Matrix parse_raw(std::string_view bytes);
std::string encode_raw(const Matrix& a);

Matrix parse_csv(std::string_view text);
std::string encode_csv(const Matrix& a);

// Asymmetric input is replaced by (A + A^T) / 2; a notice goes to notes when the
// asymmetry is above roundoff.
Matrix read_matrix(const std::string& path, MatrixFormat format, std::vector<std::string>* notes = nullptr);
void write_matrix(const std::string& path, const Matrix& a, MatrixFormat format);

}  // namespace bspeig::harness
