#pragma once

#include <span>
#include <vector>

#include "bspeig/matrix.hpp"

namespace bspeig::bsp {

// Partition of [0, n) into parts: either cyclic (i -> i mod parts) or contiguous blocks.
class Dist1D {
 public:
  Dist1D() = default;
  static Dist1D cyclic(Index n, int parts);
  // Balanced contiguous blocks with floor boundaries.
  static Dist1D blocked(Index n, int parts);
  // offsets has parts+1 nondecreasing entries from 0 to n.
  static Dist1D with_offsets(std::vector<Index> offsets);

  Index size() const { return n_; }
  int parts() const { return parts_; }
  bool is_cyclic() const { return cyclic_; }
  const std::vector<Index>& offsets() const { return offsets_; }

  int part_of(Index i) const;
  Index local_of(Index i) const;
  Index local_size(int part) const;
  Index global_of(int part, Index local) const;
  // Largest local size.
  Index max_local() const;

  // Restriction to [begin, begin+count). Cyclic needs begin % parts == 0. Blocked drops
  // parts that become empty and reports the surviving original part ids in kept.
  Dist1D slice(Index begin, Index count, std::vector<int>* kept = nullptr) const;

  bool operator==(const Dist1D&) const = default;

 private:
  Index n_ = 0;
  int parts_ = 1;
  bool cyclic_ = false;
  std::vector<Index> offsets_;  // blocked only
};

// A q x q x c processor grid drawn from an ordered processor list; ids[(l*q + i)*q + j].
struct ProcGrid {
  int q = 1;
  int c = 1;
  double delta = 0.5;
  std::vector<int> ids;

  // q = p^(1-delta), c = p^(2 delta - 1), each rounded down to a power of two.
  static ProcGrid for_delta(std::span<const int> procs, double delta);
  static ProcGrid make(std::span<const int> procs, int q, int c);

  int size() const { return q * q * c; }
  int at(int i, int j, int l) const { return ids[static_cast<std::size_t>((l * q + i) * q + j)]; }
  // Processors Pi[:, 0:z, :].
  std::vector<int> column_subgrid(int z) const;
  void validate() const;
};

// Where every (replica, row part, column part) cell lives.
struct Layout {
  Dist1D rows;
  Dist1D cols;
  int replicas = 1;
  std::vector<int> owners;  // [(replica * rparts + rpart) * cparts + cpart]

  int cell(int replica, int rpart, int cpart) const {
    return (replica * rows.parts() + rpart) * cols.parts() + cpart;
  }
  int owner(int replica, int rpart, int cpart) const {
    return owners[static_cast<std::size_t>(cell(replica, rpart, cpart))];
  }
  int cells() const { return static_cast<int>(owners.size()); }
  int cells_per_replica() const { return rows.parts() * cols.parts(); }

  static Layout single(Index rows, Index cols, int proc);
  // Contiguous row blocks, balanced, one per processor in order.
  static Layout block_rows(Index rows, Index cols, std::span<const int> procs);
  static Layout block_rows(Dist1D rows, Index cols, std::span<const int> procs);
  // Contiguous column blocks.
  static Layout block_cols(Index rows, Index cols, std::span<const int> procs);
  // Cyclic on the q x q face of the grid, replicated over its c layers.
  static Layout replicated_cyclic(Index rows, Index cols, const ProcGrid& grid);
  // Same, with rows and columns swapped (cell (i,j,l) owned by grid.at(j,i,l)).
  static Layout replicated_cyclic_transposed(Index rows, Index cols, const ProcGrid& grid);

  Layout transposed() const;
  std::vector<int> procs() const;  // distinct, ascending
  bool load_balanced(int p) const;
  void validate(int machine_procs) const;
  bool operator==(const Layout&) const = default;
};

std::vector<int> iota_procs(int begin, int count);

}  // namespace bspeig::bsp
