#pragma once

#include <vector>

#include "bspeig/matrix.hpp"
#include "bspeig/meter.hpp"

namespace bspeig::reduce {

struct Range {
  Index begin = 0;
  Index end = 0;  // exclusive
  Index size() const { return end - begin; }
  bool operator==(const Range&) const = default;
};

// Offsets of bulge chase (i, j) when reducing bandwidth b to h = b / k. Offsets are
// 0-based; i and j count from 1 as in the sweep loops.
struct BulgeIndexSet {
  int i = 1;
  int j = 1;
  Index h = 0;
  Index o_blg = 0;
  Index o_qr_r = 0;
  Index o_qr_c = 0;
  Index o_v = 0;
  Index o_up_c = 0;
  Index n_r = 0;
  Index n_c = 0;

  Range qr_rows() const { return {o_qr_r, o_qr_r + n_r}; }
  Range qr_cols() const { return {o_qr_c, o_qr_c + h}; }
  Range v_rows() const { return {o_v, o_v + n_r}; }
  Range up_cols() const { return {o_up_c, o_up_c + n_c}; }
  // Every row and column index the chase reads or writes.
  Range footprint() const { return {o_qr_c, o_up_c + n_c}; }
};

BulgeIndexSet bulge_indices(Index n, Index b, Index k, int i, int j);

// Number of chases in sweep i; sweeps run for i = 1 .. n/h - 1.
int chases_in_sweep(Index n, Index b, Index k, int i);

// Distance from the diagonal that fill can reach during the reduction.
Index bulge_capacity(Index b, Index k);

struct Chase {
  int i = 1;
  int j = 1;
};

// Chases grouped by phase 3(i-1)+j. Chases sharing a phase touch disjoint entries.
std::vector<std::vector<Chase>> chase_phases(Index n, Index b, Index k);

// One chase on local blocks. p = B[qr rows, qr cols] becomes [R; 0] and
// x = B[up cols, qr rows] receives both sides of the reflector update.
void chase_local(MatrixView p, MatrixView x, Index o_v, const Meter& meter = {});

// Sequential reference: reduces dense symmetric a from bandwidth b to b / k in place.
void band_to_band_dense(Matrix& a, Index b, Index k, const Meter& meter = {});

}  // namespace bspeig::reduce
