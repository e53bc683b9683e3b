#include "bspeig/bsp/collectives.hpp"

#include <string>

#include "bspeig/errors.hpp"
#include "bspeig/meter.hpp"

namespace bspeig::bsp {

namespace {

void check_group(std::span<const Matrix> pieces, std::span<const int> group, const char* what) {
  if (group.empty()) throw InvalidArgument(std::string(what) + ": empty group");
  if (pieces.size() != group.size())
    throw ShapeError(std::string(what) + ": one piece per member required");
}

std::vector<double> flatten(const Matrix& m) { return {m.values().begin(), m.values().end()}; }

Matrix unflatten(const std::vector<double>& v, Index rows, Index cols) {
  Matrix m(rows, cols);
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

Matrix slice_of(const Matrix& m, Axis axis, Index lo, Index hi) {
  if (axis == Axis::rows) return Matrix::copy_of(m.block(lo, 0, hi - lo, m.cols()));
  return Matrix::copy_of(m.block(0, lo, m.rows(), hi - lo));
}

}  // namespace

Matrix concat(std::span<const Matrix> pieces, Axis axis) {
  if (pieces.empty()) return {};
  Index rows = 0, cols = 0;
  for (const Matrix& p : pieces) {
    if (axis == Axis::rows) {
      if (p.cols() != pieces[0].cols()) throw ShapeError("concat: column count mismatch");
      rows += p.rows();
      cols = p.cols();
    } else {
      if (p.rows() != pieces[0].rows()) throw ShapeError("concat: row count mismatch");
      cols += p.cols();
      rows = p.rows();
    }
  }
  Matrix out(rows, cols);
  Index at = 0;
  for (const Matrix& p : pieces) {
    if (axis == Axis::rows) {
      copy_into(p.view(), out.block(at, 0, p.rows(), p.cols()));
      at += p.rows();
    } else {
      copy_into(p.view(), out.block(0, at, p.rows(), p.cols()));
      at += p.cols();
    }
  }
  return out;
}

std::vector<Index> scatter_offsets(Index extent, int members) {
  std::vector<Index> off(static_cast<std::size_t>(members) + 1);
  for (int i = 0; i <= members; ++i) off[static_cast<std::size_t>(i)] = extent * i / members;
  return off;
}

Matrix collective_gather(Engine& engine, std::span<const Matrix> pieces, std::span<const int> group, int root,
                         Axis axis) {
  check_group(pieces, group, "gather");
  if (group.size() == 1) return pieces[0];
  std::vector<Message> out;
  for (std::size_t i = 0; i < group.size(); ++i)
    if (group[i] != root) out.push_back(Message{group[i], root, flatten(pieces[i]), static_cast<int>(i)});
  std::vector<Matrix> at_root(pieces.begin(), pieces.end());
  for (const Message& m : engine.exchange(std::move(out))) {
    const auto i = static_cast<std::size_t>(m.tag);
    at_root[i] = unflatten(m.payload, pieces[i].rows(), pieces[i].cols());
  }
  return concat(at_root, axis);
}

std::vector<Matrix> collective_allgather(Engine& engine, std::span<const Matrix> pieces,
                                         std::span<const int> group, Axis axis) {
  check_group(pieces, group, "allgather");
  if (group.size() == 1) return {pieces[0]};
  std::vector<Message> out;
  for (std::size_t i = 0; i < group.size(); ++i)
    for (std::size_t j = 0; j < group.size(); ++j)
      if (i != j) out.push_back(Message{group[i], group[j], flatten(pieces[i]), static_cast<int>(i)});
  // received[j][i]: piece i as seen by member j.
  std::vector<std::vector<Matrix>> received(group.size(), std::vector<Matrix>(pieces.begin(), pieces.end()));
  std::vector<std::size_t> member_of;
  for (const Message& m : engine.exchange(std::move(out))) {
    std::size_t j = 0;
    while (group[j] != m.dst) ++j;
    const auto i = static_cast<std::size_t>(m.tag);
    received[j][i] = unflatten(m.payload, pieces[i].rows(), pieces[i].cols());
  }
  std::vector<Matrix> result;
  result.reserve(group.size());
  for (auto& r : received) result.push_back(concat(r, axis));
  return result;
}

std::vector<Matrix> collective_reduce_scatter(Engine& engine, std::span<const Matrix> blocks,
                                              std::span<const int> group, Axis axis) {
  check_group(blocks, group, "reduce_scatter");
  for (const Matrix& b : blocks)
    if (b.rows() != blocks[0].rows() || b.cols() != blocks[0].cols())
      throw ShapeError("reduce_scatter: block shapes differ across members");
  const auto members = static_cast<int>(group.size());
  const Index extent = axis == Axis::rows ? blocks[0].rows() : blocks[0].cols();
  const auto off = scatter_offsets(extent, members);
  if (members == 1) return {blocks[0]};

  std::vector<Message> out;
  for (int i = 0; i < members; ++i)
    for (int j = 0; j < members; ++j) {
      if (i == j) continue;
      Matrix s = slice_of(blocks[static_cast<std::size_t>(i)], axis, off[static_cast<std::size_t>(j)],
                          off[static_cast<std::size_t>(j) + 1]);
      out.push_back(Message{group[static_cast<std::size_t>(i)], group[static_cast<std::size_t>(j)], flatten(s), i});
    }
  // parts[j][i]: contribution of member i to member j's slice.
  std::vector<std::vector<Matrix>> parts(static_cast<std::size_t>(members),
                                         std::vector<Matrix>(static_cast<std::size_t>(members)));
  for (int j = 0; j < members; ++j)
    parts[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] =
        slice_of(blocks[static_cast<std::size_t>(j)], axis, off[static_cast<std::size_t>(j)],
                 off[static_cast<std::size_t>(j) + 1]);
  for (const Message& m : engine.exchange(std::move(out))) {
    int j = 0;
    while (group[static_cast<std::size_t>(j)] != m.dst) ++j;
    const Matrix& own = parts[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    parts[static_cast<std::size_t>(j)][static_cast<std::size_t>(m.tag)] = unflatten(m.payload, own.rows(), own.cols());
  }
  std::vector<Matrix> result;
  for (int j = 0; j < members; ++j) {
    auto& pj = parts[static_cast<std::size_t>(j)];
    Matrix sum = pj[0];
    for (int i = 1; i < members; ++i) {
      const Matrix& add = pj[static_cast<std::size_t>(i)];
      for (Index k = 0; k < sum.size(); ++k) sum.data()[k] += add.data()[k];
    }
    Meter(engine, group[static_cast<std::size_t>(j)]).elementwise(sum.size() * (members - 1), 1);
    result.push_back(std::move(sum));
  }
  return result;
}

}  // namespace bspeig::bsp
