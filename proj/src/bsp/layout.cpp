#include "bspeig/bsp/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "bspeig/errors.hpp"
#include "bspeig/numeric.hpp"

namespace bspeig::bsp {

Dist1D Dist1D::cyclic(Index n, int parts) {
  if (n < 0 || parts < 1) throw InvalidArgument("cyclic distribution: bad size or part count");
  Dist1D d;
  d.n_ = n;
  d.parts_ = parts;
  d.cyclic_ = true;
  return d;
}

Dist1D Dist1D::blocked(Index n, int parts) {
  if (n < 0 || parts < 1) throw InvalidArgument("blocked distribution: bad size or part count");
  std::vector<Index> off(static_cast<std::size_t>(parts) + 1);
  for (int i = 0; i <= parts; ++i) off[static_cast<std::size_t>(i)] = (n * i) / parts;
  return with_offsets(std::move(off));
}

Dist1D Dist1D::with_offsets(std::vector<Index> offsets) {
  if (offsets.size() < 2 || offsets.front() != 0)
    throw InvalidArgument("blocked distribution: offsets must start at 0");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] < offsets[i - 1]) throw InvalidArgument("blocked distribution: decreasing offsets");
  Dist1D d;
  d.n_ = offsets.back();
  d.parts_ = static_cast<int>(offsets.size()) - 1;
  d.cyclic_ = false;
  d.offsets_ = std::move(offsets);
  return d;
}

int Dist1D::part_of(Index i) const {
  if (cyclic_) return static_cast<int>(i % parts_);
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

Index Dist1D::local_of(Index i) const {
  if (cyclic_) return i / parts_;
  return i - offsets_[static_cast<std::size_t>(part_of(i))];
}

Index Dist1D::local_size(int part) const {
  if (cyclic_) return n_ / parts_ + (part < n_ % parts_ ? 1 : 0);
  return offsets_[static_cast<std::size_t>(part) + 1] - offsets_[static_cast<std::size_t>(part)];
}

Index Dist1D::global_of(int part, Index local) const {
  if (cyclic_) return local * parts_ + part;
  return offsets_[static_cast<std::size_t>(part)] + local;
}

Index Dist1D::max_local() const {
  Index m = 0;
  for (int p = 0; p < parts_; ++p) m = std::max(m, local_size(p));
  return m;
}

Dist1D Dist1D::slice(Index begin, Index count, std::vector<int>* kept) const {
  if (begin < 0 || count < 0 || begin + count > n_) throw ShapeError("distribution slice out of range");
  if (cyclic_) {
    if (begin % parts_ != 0)
      throw ShapeError("cyclic slice must start at a multiple of the part count");
    if (kept) {
      kept->resize(static_cast<std::size_t>(parts_));
      for (int p = 0; p < parts_; ++p) (*kept)[static_cast<std::size_t>(p)] = p;
    }
    return cyclic(count, parts_);
  }
  std::vector<Index> off{0};
  std::vector<int> ids;
  for (int p = 0; p < parts_; ++p) {
    const Index lo = std::max(begin, offsets_[static_cast<std::size_t>(p)]);
    const Index hi = std::min(begin + count, offsets_[static_cast<std::size_t>(p) + 1]);
    if (hi <= lo) continue;
    off.push_back(off.back() + (hi - lo));
    ids.push_back(p);
  }
  if (ids.empty()) {
    // Empty slice keeps a single empty part owned by the first original part.
    off.push_back(0);
    ids.push_back(0);
  }
  if (kept) *kept = std::move(ids);
  return with_offsets(std::move(off));
}

ProcGrid ProcGrid::for_delta(std::span<const int> procs, double delta) {
  if (delta < 0.5 - 1e-12 || delta > 2.0 / 3.0 + 1e-12)
    throw InvalidArgument("delta must lie in [1/2, 2/3]");
  const double p = static_cast<double>(procs.size());
  int q = static_cast<int>(pow2_floor(std::pow(p, 1.0 - delta)));
  int c = static_cast<int>(pow2_floor(std::pow(p, 2.0 * delta - 1.0)));
  while (static_cast<std::size_t>(q) * q * c > procs.size()) {
    if (c > 1) c /= 2;
    else q /= 2;
  }
  ProcGrid g = make(procs.first(static_cast<std::size_t>(q) * q * c), q, c);
  g.delta = delta;
  return g;
}

ProcGrid ProcGrid::make(std::span<const int> procs, int q, int c) {
  if (q < 1 || c < 1) throw InvalidArgument("grid: q and c must be positive");
  if (procs.size() != static_cast<std::size_t>(q) * q * c)
    throw InvalidArgument("grid: need q*q*c processors, got " + std::to_string(procs.size()));
  ProcGrid g;
  g.q = q;
  g.c = c;
  g.ids.assign(procs.begin(), procs.end());
  // delta from c = p^(2 delta - 1) when p > 1.
  const double p = static_cast<double>(g.size());
  g.delta = p > 1 ? 0.5 * (1.0 + std::log(static_cast<double>(c)) / std::log(p)) : 0.5;
  g.validate();
  return g;
}

std::vector<int> ProcGrid::column_subgrid(int z) const {
  if (z < 1 || z > q) throw InvalidArgument("grid: subgrid width out of range");
  std::vector<int> out;
  for (int l = 0; l < c; ++l)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < z; ++j) out.push_back(at(i, j, l));
  return out;
}

void ProcGrid::validate() const {
  std::set<int> seen(ids.begin(), ids.end());
  if (seen.size() != ids.size()) throw InvalidArgument("grid: duplicate processor ids");
  if (static_cast<int>(ids.size()) != q * q * c) throw InvalidArgument("grid: size mismatch");
}

Layout Layout::single(Index rows, Index cols, int proc) {
  return Layout{Dist1D::blocked(rows, 1), Dist1D::blocked(cols, 1), 1, {proc}};
}

Layout Layout::block_rows(Index rows, Index cols, std::span<const int> procs) {
  if (procs.empty()) throw InvalidArgument("block_rows: empty processor set");
  return block_rows(Dist1D::blocked(rows, static_cast<int>(procs.size())), cols, procs);
}

Layout Layout::block_rows(Dist1D rows, Index cols, std::span<const int> procs) {
  if (static_cast<int>(procs.size()) != rows.parts())
    throw InvalidArgument("block_rows: one processor per row part required");
  return Layout{std::move(rows), Dist1D::blocked(cols, 1), 1, {procs.begin(), procs.end()}};
}

Layout Layout::block_cols(Index rows, Index cols, std::span<const int> procs) {
  if (procs.empty()) throw InvalidArgument("block_cols: empty processor set");
  return Layout{Dist1D::blocked(rows, 1), Dist1D::blocked(cols, static_cast<int>(procs.size())), 1,
                {procs.begin(), procs.end()}};
}

Layout Layout::replicated_cyclic(Index rows, Index cols, const ProcGrid& grid) {
  Layout l{Dist1D::cyclic(rows, grid.q), Dist1D::cyclic(cols, grid.q), grid.c, {}};
  l.owners.resize(static_cast<std::size_t>(grid.size()));
  for (int r = 0; r < grid.c; ++r)
    for (int i = 0; i < grid.q; ++i)
      for (int j = 0; j < grid.q; ++j) l.owners[static_cast<std::size_t>(l.cell(r, i, j))] = grid.at(i, j, r);
  return l;
}

Layout Layout::replicated_cyclic_transposed(Index rows, Index cols, const ProcGrid& grid) {
  Layout l = replicated_cyclic(cols, rows, grid);
  return l.transposed();
}

Layout Layout::transposed() const {
  Layout t{cols, rows, replicas, std::vector<int>(owners.size())};
  for (int r = 0; r < replicas; ++r)
    for (int i = 0; i < rows.parts(); ++i)
      for (int j = 0; j < cols.parts(); ++j) t.owners[static_cast<std::size_t>(t.cell(r, j, i))] = owner(r, i, j);
  return t;
}

std::vector<int> Layout::procs() const {
  std::set<int> s(owners.begin(), owners.end());
  return {s.begin(), s.end()};
}

bool Layout::load_balanced(int p) const {
  std::map<int, Index> held;
  for (int r = 0; r < replicas; ++r)
    for (int i = 0; i < rows.parts(); ++i)
      for (int j = 0; j < cols.parts(); ++j) held[owner(r, i, j)] += rows.local_size(i) * cols.local_size(j);
  const Index total = rows.size() * cols.size() * replicas;
  const Index bound = (total + p - 1) / p + std::max(rows.size(), cols.size());
  for (const auto& [proc, words] : held)
    if (words > bound) return false;
  return true;
}

void Layout::validate(int machine_procs) const {
  if (replicas < 1) throw InvalidArgument("layout: replicas must be >= 1");
  if (static_cast<int>(owners.size()) != replicas * rows.parts() * cols.parts())
    throw InvalidArgument("layout: owner table size mismatch");
  for (int o : owners)
    if (o < 0 || o >= machine_procs)
      throw ModelViolation("layout: owner " + std::to_string(o) + " outside machine");
}

std::vector<int> iota_procs(int begin, int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = begin + i;
  return v;
}

}  // namespace bspeig::bsp
