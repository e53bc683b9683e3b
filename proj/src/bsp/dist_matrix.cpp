#include "bspeig/bsp/dist_matrix.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "bspeig/errors.hpp"
#include "bspeig/meter.hpp"

namespace bspeig::bsp {

DistMatrix::DistMatrix(Engine& engine, Layout layout) : DistMatrix(engine, std::move(layout), true) {}

DistMatrix::DistMatrix(Engine& engine, Layout layout, bool allocate)
    : engine_(&engine), layout_(std::move(layout)) {
  layout_.validate(engine.procs());
  if (!allocate) return;
  tiles_.reserve(static_cast<std::size_t>(layout_.cells()));
  for (int r = 0; r < layout_.replicas; ++r)
    for (int i = 0; i < layout_.rows.parts(); ++i)
      for (int j = 0; j < layout_.cols.parts(); ++j)
        tiles_.emplace_back(layout_.rows.local_size(i), layout_.cols.local_size(j));
  lease_all();
}

void DistMatrix::lease_all() {
  leases_.clear();
  leases_.reserve(tiles_.size());
  for (std::size_t c = 0; c < tiles_.size(); ++c)
    leases_.emplace_back(*engine_, layout_.owners[c], tiles_[c].size());
}

DistMatrix DistMatrix::place(Engine& engine, const Matrix& global, Layout layout) {
  if (global.rows() != layout.rows.size() || global.cols() != layout.cols.size())
    throw ShapeError("place: matrix does not match layout");
  DistMatrix d(engine, std::move(layout));
  for (int r = 0; r < d.layout_.replicas; ++r)
    for (Index i = 0; i < global.rows(); ++i)
      for (Index j = 0; j < global.cols(); ++j) d.ref(i, j, r) = global(i, j);
  return d;
}

DistMatrix DistMatrix::clone() const {
  DistMatrix d(*engine_, layout_, false);
  d.tiles_ = tiles_;
  d.lease_all();
  return d;
}

DistMatrix::Slot DistMatrix::locate(Index i, Index j, int replica) const {
  const int rp = layout_.rows.part_of(i);
  const int cp = layout_.cols.part_of(j);
  return {layout_.cell(replica, rp, cp), layout_.rows.local_of(i), layout_.cols.local_of(j)};
}

double& DistMatrix::ref(Index i, Index j, int replica) {
  const Slot s = locate(i, j, replica);
  return tiles_[static_cast<std::size_t>(s.cell)](s.li, s.lj);
}

double DistMatrix::get(Index i, Index j, int replica) const {
  const Slot s = locate(i, j, replica);
  return tiles_[static_cast<std::size_t>(s.cell)](s.li, s.lj);
}

Matrix DistMatrix::gather() const {
  Matrix g(rows(), cols());
  for (int i = 0; i < layout_.rows.parts(); ++i)
    for (int j = 0; j < layout_.cols.parts(); ++j) {
      const Matrix& t = tiles_[static_cast<std::size_t>(layout_.cell(0, i, j))];
      for (Index a = 0; a < t.rows(); ++a)
        for (Index b = 0; b < t.cols(); ++b)
          g(layout_.rows.global_of(i, a), layout_.cols.global_of(j, b)) = t(a, b);
    }
  return g;
}

bool DistMatrix::replicas_identical() const {
  const int per = layout_.cells_per_replica();
  for (int r = 1; r < layout_.replicas; ++r)
    for (int c = 0; c < per; ++c) {
      const Matrix& a = tiles_[static_cast<std::size_t>(c)];
      const Matrix& b = tiles_[static_cast<std::size_t>(r * per + c)];
      if (a.size() != b.size() ||
          std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) != 0)
        return false;
    }
  return true;
}

DistMatrix DistMatrix::transposed() const {
  DistMatrix t(*engine_, layout_.transposed(), false);
  t.tiles_.resize(tiles_.size());
  for (int r = 0; r < layout_.replicas; ++r)
    for (int i = 0; i < layout_.rows.parts(); ++i)
      for (int j = 0; j < layout_.cols.parts(); ++j)
        t.tiles_[static_cast<std::size_t>(t.layout_.cell(r, j, i))] =
            tiles_[static_cast<std::size_t>(layout_.cell(r, i, j))].transposed();
  t.lease_all();
  return t;
}

DistMatrix DistMatrix::slice(Index r0, Index c0, Index nr, Index nc) const {
  std::vector<int> kr, kc;
  Layout l;
  l.rows = layout_.rows.slice(r0, nr, &kr);
  l.cols = layout_.cols.slice(c0, nc, &kc);
  l.replicas = layout_.replicas;
  l.owners.resize(static_cast<std::size_t>(l.replicas * l.rows.parts() * l.cols.parts()));
  for (int r = 0; r < l.replicas; ++r)
    for (int i = 0; i < l.rows.parts(); ++i)
      for (int j = 0; j < l.cols.parts(); ++j)
        l.owners[static_cast<std::size_t>(l.cell(r, i, j))] =
            layout_.owner(r, kr[static_cast<std::size_t>(i)], kc[static_cast<std::size_t>(j)]);

  DistMatrix s(*engine_, std::move(l), false);
  const Layout& sl = s.layout_;
  s.tiles_.resize(sl.owners.size());
  auto local_begin = [](const Dist1D& d, int part, Index begin) {
    if (d.is_cyclic()) return begin / d.parts();
    return std::max<Index>(0, begin - d.offsets()[static_cast<std::size_t>(part)]);
  };
  for (int r = 0; r < sl.replicas; ++r)
    for (int i = 0; i < sl.rows.parts(); ++i)
      for (int j = 0; j < sl.cols.parts(); ++j) {
        const int oi = kr[static_cast<std::size_t>(i)];
        const int oj = kc[static_cast<std::size_t>(j)];
        const Matrix& src = tiles_[static_cast<std::size_t>(layout_.cell(r, oi, oj))];
        const Index lr = sl.rows.local_size(i);
        const Index lc = sl.cols.local_size(j);
        Matrix& dst = s.tiles_[static_cast<std::size_t>(sl.cell(r, i, j))];
        if (lr == 0 || lc == 0) {
          dst = Matrix(lr, lc);
          continue;
        }
        dst = Matrix::copy_of(
            src.block(local_begin(layout_.rows, oi, r0), local_begin(layout_.cols, oj, c0), lr, lc));
      }
  s.lease_all();
  return s;
}

void DistMatrix::scale(double s) {
  for (std::size_t c = 0; c < tiles_.size(); ++c) {
    for (double& x : tiles_[c].values()) x *= s;
    Meter(*engine_, layout_.owners[c]).elementwise(tiles_[c].size(), 1, 1);
  }
}

void Transfer::copy(const DistMatrix& src, Index sr, Index sc, DistMatrix& dst, Index dr, Index dc, Index nr,
                    Index nc, bool transpose, int src_replica) {
  block(src, sr, sc, dst, dr, dc, nr, nc, transpose, false, src_replica);
}

void Transfer::add(const DistMatrix& src, Index sr, Index sc, DistMatrix& dst, Index dr, Index dc, Index nr,
                   Index nc, bool transpose, int src_replica) {
  block(src, sr, sc, dst, dr, dc, nr, nc, transpose, true, src_replica);
}

void Transfer::copy_element(const DistMatrix& src, Index si, Index sj, DistMatrix& dst, Index di, Index dj,
                            bool accumulate) {
  if (si < 0 || sj < 0 || si >= src.rows() || sj >= src.cols() || di < 0 || dj < 0 || di >= dst.rows() ||
      dj >= dst.cols())
    throw ShapeError("transfer: element outside matrix");
  if (&src.engine() != engine_ || &dst.engine() != engine_) throw InvalidArgument("transfer: engine mismatch");
  element(src, si, sj, dst, di, dj, accumulate);
}

void Transfer::block(const DistMatrix& src, Index sr, Index sc, DistMatrix& dst, Index dr, Index dc, Index nr,
                     Index nc, bool transpose, bool add, int src_replica) {
  if (src_replica >= src.layout().replicas) throw InvalidArgument("transfer: source replica out of range");
  const Index snr = transpose ? nc : nr;
  const Index snc = transpose ? nr : nc;
  if (sr < 0 || sc < 0 || sr + snr > src.rows() || sc + snc > src.cols())
    throw ShapeError("transfer: source block outside " + std::to_string(src.rows()) + "x" +
                     std::to_string(src.cols()));
  if (dr < 0 || dc < 0 || dr + nr > dst.rows() || dc + nc > dst.cols())
    throw ShapeError("transfer: destination block outside " + std::to_string(dst.rows()) + "x" +
                     std::to_string(dst.cols()));
  if (&src.engine() != engine_ || &dst.engine() != engine_) throw InvalidArgument("transfer: engine mismatch");
  ops_.reserve(ops_.size() + static_cast<std::size_t>(nr * nc * dst.layout().replicas));
  for (Index i = 0; i < nr; ++i)
    for (Index j = 0; j < nc; ++j) {
      if (transpose) element(src, sr + j, sc + i, dst, dr + i, dc + j, add, src_replica);
      else element(src, sr + i, sc + j, dst, dr + i, dc + j, add, src_replica);
    }
}

void Transfer::element(const DistMatrix& src, Index si, Index sj, DistMatrix& dst, Index di, Index dj, bool add,
                       int src_replica) {
  const Layout& sl = src.layout();
  const Layout& dl = dst.layout();
  const int srp = sl.rows.part_of(si);
  const int scp = sl.cols.part_of(sj);
  const Index sli = sl.rows.local_of(si);
  const Index slj = sl.cols.local_of(sj);
  const int drp = dl.rows.part_of(di);
  const int dcp = dl.cols.part_of(dj);
  const Index dli = dl.rows.local_of(di);
  const Index dlj = dl.cols.local_of(dj);
  for (int r = 0; r < dl.replicas; ++r) {
    const int dcell = dl.cell(r, drp, dcp);
    const int dp = dl.owners[static_cast<std::size_t>(dcell)];
    int pick = r % sl.replicas;
    if (src_replica >= 0) {
      pick = src_replica;
    } else {
      for (int sr = 0; sr < sl.replicas; ++sr)
        if (sl.owner(sr, srp, scp) == dp) {
          pick = sr;
          break;
        }
    }
    const int scell = sl.cell(pick, srp, scp);
    ops_.push_back(Op{&src.tile(scell)(sli, slj), &dst.tile(dcell)(dli, dlj),
                      sl.owners[static_cast<std::size_t>(scell)], dp, add});
  }
}

std::int64_t Transfer::remote_words() const {
  std::int64_t w = 0;
  for (const Op& op : ops_)
    if (op.sp != op.dp) ++w;
  return w;
}

bool Transfer::commit(bool force_barrier) {
  std::vector<double> vals(ops_.size());
  for (std::size_t k = 0; k < ops_.size(); ++k) vals[k] = *ops_[k].src;

  std::map<std::pair<int, int>, std::vector<std::size_t>> routes;
  for (std::size_t k = 0; k < ops_.size(); ++k)
    if (ops_[k].sp != ops_[k].dp) routes[{ops_[k].sp, ops_[k].dp}].push_back(k);

  const bool barrier = !routes.empty() || force_barrier;
  if (barrier) {
    std::vector<Message> out;
    out.reserve(routes.size());
    for (const auto& [key, idx] : routes) {
      Message m{key.first, key.second, {}, 0};
      m.payload.reserve(idx.size());
      for (std::size_t k : idx) m.payload.push_back(vals[k]);
      out.push_back(std::move(m));
    }
    for (const Message& m : engine_->exchange(std::move(out))) {
      const auto& idx = routes.at({m.src, m.dst});
      for (std::size_t t = 0; t < idx.size(); ++t) vals[idx[t]] = m.payload[t];
    }
  }

  std::vector<std::int64_t> adds(static_cast<std::size_t>(engine_->procs()), 0);
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    if (ops_[k].add) {
      *ops_[k].dst += vals[k];
      ++adds[static_cast<std::size_t>(ops_[k].dp)];
    } else {
      *ops_[k].dst = vals[k];
    }
  }
  for (std::size_t p = 0; p < adds.size(); ++p)
    if (adds[p]) engine_->charge(static_cast<int>(p), adds[p], 0);
  ops_.clear();
  return barrier;
}

DistMatrix redistribute(const DistMatrix& a, Layout target) {
  DistMatrix out(a.engine(), std::move(target));
  if (out.rows() != a.rows() || out.cols() != a.cols()) throw ShapeError("redistribute: shape mismatch");
  Transfer t(a.engine());
  t.copy_all(a, out);
  t.commit();
  return out;
}

DistMatrix vstack(std::vector<DistMatrix> parts) {
  if (parts.empty()) throw InvalidArgument("vstack: no parts");
  Engine& engine = parts.front().engine();
  const Index cols = parts.front().cols();
  std::vector<Index> off{0};
  std::vector<int> owners;
  for (const DistMatrix& p : parts) {
    const Layout& l = p.layout();
    if (p.cols() != cols) throw ShapeError("vstack: column count mismatch");
    if (l.replicas != 1 || l.cols.parts() != 1 || l.rows.is_cyclic())
      throw InvalidArgument("vstack: parts must be unreplicated row blocks");
    for (int i = 0; i < l.rows.parts(); ++i) {
      off.push_back(off.back() + l.rows.local_size(i));
      owners.push_back(l.owner(0, i, 0));
    }
  }
  DistMatrix out(engine, Layout{Dist1D::with_offsets(off), Dist1D::blocked(cols, 1), 1, owners}, false);
  for (DistMatrix& p : parts) {
    for (auto& t : p.tiles_) out.tiles_.push_back(std::move(t));
    for (auto& l : p.leases_) out.leases_.push_back(std::move(l));
  }
  return out;
}

DistMatrix hstack_cyclic(const std::vector<const DistMatrix*>& parts) {
  if (parts.empty()) throw InvalidArgument("hstack: no parts");
  const DistMatrix& first = *parts.front();
  const Layout& fl = first.layout();
  if (!fl.cols.is_cyclic()) throw InvalidArgument("hstack: column distribution must be cyclic");
  const int q = fl.cols.parts();
  Index total = 0;
  for (const DistMatrix* p : parts) {
    const Layout& l = p->layout();
    if (!(l.rows == fl.rows) || l.replicas != fl.replicas || l.owners != fl.owners || !l.cols.is_cyclic() ||
        l.cols.parts() != q)
      throw InvalidArgument("hstack: parts do not share one cyclic layout");
    if (l.cols.size() % q != 0) throw InvalidArgument("hstack: part width not a multiple of the grid side");
    total += l.cols.size();
  }
  Layout l = fl;
  l.cols = Dist1D::cyclic(total, q);
  DistMatrix out(first.engine(), l, false);
  out.tiles_.resize(static_cast<std::size_t>(l.cells()));
  for (int c = 0; c < l.cells(); ++c) {
    Index width = 0;
    for (const DistMatrix* p : parts) width += p->tile(c).cols();
    Matrix t(first.tile(c).rows(), width);
    Index at = 0;
    for (const DistMatrix* p : parts) {
      const Matrix& s = p->tile(c);
      copy_into(s.view(), t.block(0, at, s.rows(), s.cols()));
      at += s.cols();
    }
    out.tiles_[static_cast<std::size_t>(c)] = std::move(t);
  }
  out.lease_all();
  return out;
}

void axpy_local(DistMatrix& a, double s, const DistMatrix& b) {
  if (!(a.layout() == b.layout())) throw InvalidArgument("axpy_local: layouts differ");
  for (int c = 0; c < a.layout().cells(); ++c) {
    Matrix& x = a.tile(c);
    const Matrix& y = b.tile(c);
    for (Index k = 0; k < x.size(); ++k) x.data()[k] += s * y.data()[k];
    Meter(a.engine(), a.owner(c)).elementwise(x.size(), 2);
  }
}

}  // namespace bspeig::bsp
