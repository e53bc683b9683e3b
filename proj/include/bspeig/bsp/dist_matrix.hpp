#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "bspeig/bsp/engine.hpp"
#include "bspeig/bsp/layout.hpp"
#include "bspeig/matrix.hpp"

namespace bspeig::bsp {

// A matrix split into tiles, one per layout cell, each held (and leased) by its owner.
class DistMatrix {
 public:
  DistMatrix(Engine& engine, Layout layout);
  DistMatrix(DistMatrix&&) noexcept = default;
  DistMatrix& operator=(DistMatrix&&) noexcept = default;
  DistMatrix(const DistMatrix&) = delete;
  DistMatrix& operator=(const DistMatrix&) = delete;

  // Places a global matrix without metering; models input that already sits in this layout.
  static DistMatrix place(Engine& engine, const Matrix& global, Layout layout);
  DistMatrix clone() const;

  Engine& engine() const { return *engine_; }
  const Layout& layout() const { return layout_; }
  Index rows() const { return layout_.rows.size(); }
  Index cols() const { return layout_.cols.size(); }
  std::vector<int> procs() const { return layout_.procs(); }

  Matrix& tile(int cell) { return tiles_[static_cast<std::size_t>(cell)]; }
  const Matrix& tile(int cell) const { return tiles_[static_cast<std::size_t>(cell)]; }
  int owner(int cell) const { return layout_.owners[static_cast<std::size_t>(cell)]; }

  // Location of a global entry inside a replica.
  struct Slot {
    int cell;
    Index li;
    Index lj;
  };
  Slot locate(Index i, Index j, int replica = 0) const;
  double& ref(Index i, Index j, int replica = 0);
  double get(Index i, Index j, int replica = 0) const;

  // Unmetered inspection of replica 0; for tests, verification and reports.
  Matrix gather() const;
  bool replicas_identical() const;

  // Communication-free views that copy owned tiles.
  DistMatrix transposed() const;
  // Needs the cut to respect the layout (cyclic offsets divisible by the part count).
  DistMatrix slice(Index r0, Index c0, Index nr, Index nc) const;

  // Metered local scaling on every owner.
  void scale(double s);

 private:
  DistMatrix(Engine& engine, Layout layout, bool allocate);
  void lease_all();

  Engine* engine_;
  Layout layout_;
  std::vector<Matrix> tiles_;
  std::vector<MemoryLease> leases_;

  friend DistMatrix vstack(std::vector<DistMatrix> parts);
  friend DistMatrix hstack_cyclic(const std::vector<const DistMatrix*>& parts);
};

// Element moves between distributed matrices, performed in one superstep by commit().
// The source replica is the one co-located with the destination if any, else the
// destination replica index modulo the source replica count.
class Transfer {
 public:
  explicit Transfer(Engine& engine) : engine_(&engine) {}
  Transfer(const Transfer&) = delete;
  Transfer& operator=(const Transfer&) = delete;

  // dst[dr:dr+nr, dc:dc+nc] = src[sr:sr+nr, sc:sc+nc] (or its transpose), on every dst replica.
  // src_replica >= 0 pins the source replica.
  void copy(const DistMatrix& src, Index sr, Index sc, DistMatrix& dst, Index dr, Index dc, Index nr, Index nc,
            bool transpose = false, int src_replica = -1);
  void add(const DistMatrix& src, Index sr, Index sc, DistMatrix& dst, Index dr, Index dc, Index nr, Index nc,
           bool transpose = false, int src_replica = -1);
  void copy_element(const DistMatrix& src, Index si, Index sj, DistMatrix& dst, Index di, Index dj,
                    bool accumulate = false);
  void copy_all(const DistMatrix& src, DistMatrix& dst) {
    copy(src, 0, 0, dst, 0, 0, src.rows(), src.cols());
  }

  std::int64_t remote_words() const;
  std::size_t pending() const { return ops_.size(); }
  // Exchanges if any word crosses processors (or when forced). Returns true if a superstep was used.
  bool commit(bool force_barrier = false);

 private:
  struct Op {
    const double* src;
    double* dst;
    int sp;
    int dp;
    bool add;
  };
  void block(const DistMatrix& src, Index sr, Index sc, DistMatrix& dst, Index dr, Index dc, Index nr, Index nc,
             bool transpose, bool add, int src_replica);
  void element(const DistMatrix& src, Index si, Index sj, DistMatrix& dst, Index di, Index dj, bool add,
               int src_replica = -1);

  Engine* engine_;
  std::vector<Op> ops_;
};

// Moves A into the target layout; short-circuits to no superstep when nothing moves.
DistMatrix redistribute(const DistMatrix& a, Layout target);

// Stacks row-block matrices (one column part, one replica) without communication.
DistMatrix vstack(std::vector<DistMatrix> parts);
// Concatenates columns of matrices with the same replicated cyclic row/column pattern.
// Each part's width must be a multiple of the column part count.
DistMatrix hstack_cyclic(const std::vector<const DistMatrix*>& parts);

// a += s * b elementwise for identical layouts; metered on each owner.
void axpy_local(DistMatrix& a, double s, const DistMatrix& b);

}  // namespace bspeig::bsp
