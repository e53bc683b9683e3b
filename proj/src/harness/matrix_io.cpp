#include "bspeig/harness/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bspeig::harness {

namespace {

constexpr std::size_t kHeader = 16;

std::uint32_t load_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

double load_f64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return std::bit_cast<double>(v);
}

void store_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw FormatError("csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

void symmetrize(Matrix& a, std::vector<std::string>* notes) {
  if (!is_symmetric(a, 1e-12) && notes) notes->push_back("input is not symmetric; using (A + A^T) / 2");
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
}

}  // namespace

MatrixFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".csv") return MatrixFormat::csv;
  return MatrixFormat::raw;
}

Matrix parse_raw(std::string_view bytes) {
  if (bytes.size() < kHeader) throw FormatError("raw: truncated header");
  if (bytes.substr(0, 4) != "SYMM") throw FormatError("raw: bad magic");
  const std::uint32_t n = load_u32(bytes.data() + 4);
  const std::size_t count = std::size_t{n} * n;
  if (bytes.size() != kHeader + 8 * count)
    throw FormatError("raw: expected " + std::to_string(count) + " values for n = " + std::to_string(n));
  Matrix a(n, n);
  const char* p = bytes.data() + kHeader;
  for (std::size_t i = 0; i < count; ++i) a.data()[i] = load_f64(p + 8 * i);
  return a;
}

std::string encode_raw(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("raw: matrix must be square");
  std::string out = "SYMM";
  store_u32(out, static_cast<std::uint32_t>(a.rows()));
  store_u32(out, 0);
  store_u32(out, 0);  // pads the header to 16 bytes
  out.reserve(kHeader + 8 * static_cast<std::size_t>(a.size()));
  for (double v : a.values()) store_f64(out, v);
  return out;
}

Matrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view row = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line;
    if (trim(row).empty()) continue;
    std::vector<double> vals;
    while (true) {
      const auto comma = row.find(',');
      vals.push_back(parse_number(row.substr(0, comma), line));
      if (comma == std::string_view::npos) break;
      row = row.substr(comma + 1);
    }
    rows.push_back(std::move(vals));
  }
  const Index n = static_cast<Index>(rows.size());
  if (n == 0) throw FormatError("csv: no data");
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(r.size()) != n)
      throw FormatError("csv: row " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                        " values, expected " + std::to_string(n));
    for (Index j = 0; j < n; ++j) a(i, j) = r[static_cast<std::size_t>(j)];
  }
  return a;
}

std::string encode_csv(const Matrix& a) {
  std::ostringstream os;
  os.precision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) os << (j ? "," : "") << a(i, j);
    os << '\n';
  }
  return os.str();
}

Matrix read_matrix(const std::string& path, MatrixFormat format, std::vector<std::string>* notes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  Matrix a = format == MatrixFormat::csv ? parse_csv(data) : parse_raw(data);
  symmetrize(a, notes);
  return a;
}

void write_matrix(const std::string& path, const Matrix& a, MatrixFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << (format == MatrixFormat::csv ? encode_csv(a) : encode_raw(a));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace bspeig::harness
