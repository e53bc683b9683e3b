#include "bspeig/par/qr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bspeig/bsp/collectives.hpp"
#include "bspeig/errors.hpp"
#include "bspeig/numeric.hpp"
#include "bspeig/par/matmul.hpp"

namespace bspeig::par {

using bsp::Dist1D;
using bsp::Engine;
using bsp::Layout;
using bsp::Transfer;

QrTreePlan QrTreePlan::make(Index m, Index n, int p, double delta) {
  if (n < 1 || m < n) throw ShapeError("qr: need m >= n >= 1");
  if (p < 1) throw InvalidArgument("qr: empty processor set");
  if (delta < 0.5 || delta > 2.0 / 3.0 + 1e-12) throw InvalidArgument("qr: delta outside [1/2, 2/3]");
  QrTreePlan plan;
  plan.m = m;
  plan.n = n;
  plan.p = static_cast<int>(pow2_floor(p));
  plan.delta = delta;
  const double ratio = static_cast<double>(m) / static_cast<double>(2 * n);
  plan.r = m > 2 * n ? static_cast<int>(std::min<std::int64_t>(plan.p, pow2_ceil(ratio))) : 1;
  const double lg = std::max(1.0, std::log2(static_cast<double>(plan.p)));
  const double cap = static_cast<double>(plan.p) * static_cast<double>(n) / static_cast<double>(m) *
                     std::pow(lg, 1.0 / delta);
  plan.q_max = static_cast<int>(std::clamp<std::int64_t>(pow2_nearest(cap), 1, plan.p));
  return plan;
}

namespace {

std::vector<int> pow2_prefix(std::span<const int> procs) {
  if (procs.empty()) throw InvalidArgument("qr: empty processor set");
  const auto p = pow2_floor(static_cast<double>(procs.size()));
  return {procs.begin(), procs.begin() + p};
}

ParQr local_leaf(const DistMatrix& a, int proc) {
  Engine& e = a.engine();
  DistMatrix here = bsp::redistribute(a, Layout::single(a.rows(), a.cols(), proc));
  const Meter meter(e, proc);
  QrResult f = local_qr(here.tile(0).view(), meter);
  Matrix q = explicit_q(f.factor, meter);
  return {DistMatrix::place(e, q, Layout::single(a.rows(), a.cols(), proc)),
          DistMatrix::place(e, f.r, Layout::single(a.cols(), a.cols(), proc))};
}

// Row blocks of lengths `lens`, each balanced over its own processor subset.
Layout stacked_rows(const std::vector<Index>& lens, const std::vector<std::vector<int>>& subsets, Index cols) {
  std::vector<Index> off{0};
  std::vector<int> owners;
  for (std::size_t i = 0; i < lens.size(); ++i) {
    const Dist1D d = Dist1D::blocked(lens[i], static_cast<int>(subsets[i].size()));
    const Index base = off.back();
    for (int s = 0; s < d.parts(); ++s) off.push_back(base + d.offsets()[static_cast<std::size_t>(s) + 1]);
    owners.insert(owners.end(), subsets[i].begin(), subsets[i].end());
  }
  return Layout::block_rows(Dist1D::with_offsets(off), cols, owners);
}

// Flat TSQR: local QR per row block, QR of the stacked R factors on the root, then
// each block's Q is multiplied by its slice of the root Q.
ParQr tsqr(const DistMatrix& a, const std::vector<int>& procs) {
  Engine& e = a.engine();
  const Index m = a.rows(), n = a.cols();
  const auto p = static_cast<int>(std::clamp<Index>(m / n, 1, static_cast<Index>(procs.size())));
  if (p == 1) return local_leaf(a, procs[0]);
  const std::vector<int> sub(procs.begin(), procs.begin() + p);
  const int root = sub[0];
  const DistMatrix blocks = bsp::redistribute(a, Layout::block_rows(m, n, sub));

  std::vector<Matrix> qs, rs;
  for (int i = 0; i < p; ++i) {
    const Meter meter(e, sub[static_cast<std::size_t>(i)]);
    QrResult f = local_qr(blocks.tile(i).view(), meter);
    qs.push_back(explicit_q(f.factor, meter));
    rs.push_back(std::move(f.r));
  }
  const Matrix stacked = bsp::collective_gather(e, rs, sub, root);
  const Meter meter(e, root);
  QrResult top = local_qr(stacked.view(), meter);
  const DistMatrix z = DistMatrix::place(e, explicit_q(top.factor, meter), Layout::single(p * n, n, root));
  DistMatrix zs(e, Layout::block_rows(p * n, n, sub));
  {
    Transfer t(e);
    t.copy_all(z, zs);
    t.commit();
  }
  DistMatrix q(e, blocks.layout());
  for (int i = 0; i < p; ++i)
    q.tile(i) = local_matmul(qs[static_cast<std::size_t>(i)].view(), zs.tile(i).view(),
                             Meter(e, sub[static_cast<std::size_t>(i)]));
  return {std::move(q), DistMatrix::place(e, top.r, Layout::single(n, n, root))};
}

ParQr panel_qr(const DistMatrix& a, const std::vector<int>& procs) {
  const int p = static_cast<int>(procs.size());
  if (p == 1 || a.cols() == 1) return local_leaf(a, procs[0]);
  Engine& e = a.engine();
  const Index m = a.rows(), n = a.cols();
  const std::vector<int> ids = procs;
  const Layout rows_layout = Layout::block_rows(m, n, ids);

  // At least two panels, so every recursive panel factorization is narrower.
  const int panels = static_cast<int>(std::clamp<Index>(std::lround(std::sqrt(static_cast<double>(p))), 2, n));
  const Dist1D split = Dist1D::blocked(n, panels);

  DistMatrix work = bsp::redistribute(a, rows_layout);
  DistMatrix r(e, Layout::single(n, n, ids[0]));
  std::vector<DistHouseholder> factors;
  for (int k = 0; k < panels; ++k) {
    const Index c0 = split.offsets()[static_cast<std::size_t>(k)];
    const Index w = split.local_size(k);
    const Index mk = m - c0;
    DistMatrix panel(e, Layout::block_rows(mk, w, ids));
    {
      Transfer t(e);
      t.copy(work, c0, c0, panel, 0, 0, mk, w);
      t.commit();
    }
    ParQr pq = tsqr(panel, ids);
    DistHouseholder h = householder_reconstruct(pq.q, ids);
    // Diagonal block S R_kk, on the root where both live.
    Matrix& rt = r.tile(0);
    const Matrix& rk = pq.r.tile(0);
    for (Index i = 0; i < w; ++i)
      for (Index j = i; j < w; ++j) rt(c0 + i, c0 + j) = h.signs[static_cast<std::size_t>(i)] * rk(i, j);
    const Index rest = n - c0 - w;
    if (rest > 0) {
      // Trailing columns: A <- (I - U T^T U^T) A.
      const Operand trail(work, c0, c0 + w, mk, rest);
      DistMatrix x = par_matmul(Operand::trans(h.u), trail, ids);
      DistMatrix y = par_matmul(Operand::trans(h.t), x, ids);
      par_matmul_into(h.u, y, work, c0, c0 + w, -1.0, true, ids);
    }
    factors.push_back(std::move(h));
  }
  {
    Transfer t(e);
    for (int k = 0; k < panels; ++k) {
      const Index c0 = split.offsets()[static_cast<std::size_t>(k)];
      const Index w = split.local_size(k);
      if (n - c0 - w > 0) t.copy(work, c0, c0 + w, r, c0, c0 + w, w, n - c0 - w);
    }
    t.commit();
  }

  // Q = H_1 ... H_K E, applied from the last panel back.
  DistMatrix q = DistMatrix::place(e, Matrix::eye(m, n), rows_layout);
  for (int k = panels - 1; k >= 0; --k) {
    const Index c0 = split.offsets()[static_cast<std::size_t>(k)];
    const Index mk = m - c0;
    const DistHouseholder& h = factors[static_cast<std::size_t>(k)];
    const Operand block(q, c0, c0, mk, n - c0);
    DistMatrix x = par_matmul(Operand::trans(h.u), block, ids);
    DistMatrix y = par_matmul(h.t, x, ids);
    par_matmul_into(h.u, y, q, c0, c0, -1.0, true, ids);
  }
  return {std::move(q), std::move(r)};
}

ParQr tree_qr(const DistMatrix& a, const std::vector<int>& procs, double delta) {
  Engine& e = a.engine();
  const QrTreePlan plan = QrTreePlan::make(a.rows(), a.cols(), static_cast<int>(procs.size()), delta);
  if (plan.p == 1) return local_leaf(a, procs[0]);
  if (plan.m <= 2 * plan.n) {
    const auto cap = static_cast<std::size_t>(
        pow2_floor(static_cast<double>(std::min<Index>({plan.q_max, plan.p, plan.m}))));
    return panel_qr(a, std::vector<int>(procs.begin(), procs.begin() + static_cast<std::ptrdiff_t>(cap)));
  }

  const Index m = plan.m, n = plan.n;
  const int r = plan.r;
  const int per = plan.p / r;
  const Dist1D pieces = Dist1D::blocked(m, r);
  std::vector<std::vector<int>> subsets;
  std::vector<Index> lens;
  std::vector<DistMatrix> parts;
  {
    Transfer t(e);
    for (int i = 0; i < r; ++i) {
      subsets.emplace_back(procs.begin() + i * per, procs.begin() + (i + 1) * per);
      lens.push_back(pieces.local_size(i));
      parts.emplace_back(e, Layout::block_rows(lens.back(), n, subsets.back()));
      t.copy(a, pieces.offsets()[static_cast<std::size_t>(i)], 0, parts.back(), 0, 0, lens.back(), n);
    }
    t.commit();
  }

  std::vector<ParQr> sub;
  sub.reserve(static_cast<std::size_t>(r));
  e.concurrently(r, [&](int i) {
    sub.push_back(tree_qr(parts[static_cast<std::size_t>(i)], subsets[static_cast<std::size_t>(i)], delta));
  });
  parts.clear();

  const std::vector<int> all(procs.begin(), procs.begin() + plan.p);
  DistMatrix stack(e, Layout::block_rows(r * n, n, all));
  {
    Transfer t(e);
    for (int i = 0; i < r; ++i) t.copy(sub[static_cast<std::size_t>(i)].r, 0, 0, stack, i * n, 0, n, n);
    t.commit();
  }
  ParQr top = tree_qr(stack, all, delta);

  DistMatrix q(e, stacked_rows(lens, subsets, n));
  e.concurrently(r, [&](int i) {
    const Operand z(top.q, i * n, 0, n, n);
    par_matmul_into(sub[static_cast<std::size_t>(i)].q, z, q, pieces.offsets()[static_cast<std::size_t>(i)], 0, 1.0,
                    false, subsets[static_cast<std::size_t>(i)]);
  });
  return {std::move(q), std::move(top.r)};
}

}  // namespace

ParQr rect_qr(const DistMatrix& a, std::span<const int> procs_in, double delta) {
  const std::vector<int> procs = pow2_prefix(procs_in);
  const Index m = a.rows(), n = a.cols();
  if (n < 1 || m < n) throw ShapeError("rect_qr: need m >= n >= 1");
  const Index padded = n * pow2_ceil(static_cast<double>(m) / static_cast<double>(n));
  if (padded == m) return tree_qr(a, procs, delta);

  Engine& e = a.engine();
  DistMatrix work(e, Layout::block_rows(padded, n, procs));
  {
    Transfer t(e);
    t.copy(a, 0, 0, work, 0, 0, m, n);
    t.commit();
  }
  ParQr res = tree_qr(work, procs, delta);
  return {res.q.slice(0, 0, m, n), std::move(res.r)};
}

ParQr square_qr(const DistMatrix& a, std::span<const int> procs_in, double delta) {
  const Index m = a.rows(), n = a.cols();
  if (n < 1 || m < n || m > 2 * n) throw ShapeError("square_qr: need n <= m <= 2n");
  std::vector<int> procs = pow2_prefix(procs_in);
  if (static_cast<Index>(procs.size()) > m) throw InvalidArgument("square_qr: more processors than rows");
  (void)delta;
  return panel_qr(a, procs);
}

DistHouseholder householder_reconstruct(const DistMatrix& q, std::span<const int> procs_in) {
  const std::vector<int> procs = pow2_prefix(procs_in);
  Engine& e = q.engine();
  const Index m = q.rows(), n = q.cols();
  if (n < 1 || m < n) throw ShapeError("householder_reconstruct: need m >= n >= 1");
  const int root = procs[0];
  const Meter meter(e, root);

  DistMatrix q1(e, Layout::single(n, n, root));
  {
    Transfer t(e);
    t.copy(q, 0, 0, q1, 0, 0, n, n);
    t.commit();
  }
  const LuFactors lu = lu_nopivot_adaptive(q1.tile(0).view(), meter);

  // T = -W1 S L^-T
  Matrix ws = lu.u;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) ws(i, j) *= -lu.signs[static_cast<std::size_t>(j)];
  Matrix t = local_matmul(ws.view(), lu.l_inv.transposed().view(), meter);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) t(i, j) = 0.0;

  // Top block check: Q1 S against I - L T L^T.
  {
    Matrix ltl = local_matmul(local_matmul(lu.l.view(), t.view(), meter).view(), lu.l.transposed().view(), meter);
    double res = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double want = q1.tile(0)(i, j) * lu.signs[static_cast<std::size_t>(j)];
        const double got = (i == j ? 1.0 : 0.0) - ltl(i, j);
        res += (want - got) * (want - got);
      }
    res = std::sqrt(res);
    const double tol = 1e3 * kEps * std::sqrt(static_cast<double>(m)) * static_cast<double>(n);
    if (!(res <= tol))
      throw NumericalError("householder_reconstruct: residual " + std::to_string(res), res);
  }

  DistMatrix u(e, q.layout());
  if (m > n) {
    const DistMatrix winv = DistMatrix::place(e, lu.u_inv, Layout::single(n, n, root));
    par_matmul_into(Operand(q, n, 0, m - n, n), winv, u, n, 0, 1.0, false, procs);
  }
  {
    const DistMatrix l = DistMatrix::place(e, lu.l, Layout::single(n, n, root));
    Transfer tr(e);
    tr.copy(l, 0, 0, u, 0, 0, n, n);
    tr.commit();
  }
  return {std::move(u), DistMatrix::place(e, t, Layout::single(n, n, root)), lu.signs};
}

HouseholderQr householder_qr(const DistMatrix& a, std::span<const int> procs, double delta) {
  ParQr qr = rect_qr(a, procs, delta);
  DistHouseholder h = householder_reconstruct(qr.q, procs);
  Matrix& r = qr.r.tile(0);
  for (Index i = 0; i < r.rows(); ++i)
    for (Index j = 0; j < r.cols(); ++j) r(i, j) *= h.signs[static_cast<std::size_t>(i)];
  return {std::move(h), std::move(qr.r)};
}

}  // namespace bspeig::par
