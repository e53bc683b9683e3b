#include "bspeig/reduce/band_to_band.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bspeig/errors.hpp"
#include "bspeig/numeric.hpp"
#include "bspeig/par/matmul.hpp"
#include "bspeig/par/qr.hpp"
#include "bspeig/reduce/bulge.hpp"

namespace bspeig::reduce {

using bsp::Engine;
using bsp::Layout;
using bsp::Transfer;
using par::Operand;

BandToBandPlan plan_band_to_band(Index n, Index b, int p, int k, double delta) {
  if (n < 1 || b < 1 || b >= n) throw InvalidArgument("band_to_band: bandwidth must lie in [1, n)");
  if (k < 2) throw InvalidArgument("band_to_band: k must be at least 2");
  if (n % b != 0) throw InvalidArgument("band_to_band: n mod b must be 0");
  if (b % k != 0) throw InvalidArgument("band_to_band: b mod k must be 0");
  if (delta < 0.5 || delta > 2.0 / 3.0 + 1e-12) throw InvalidArgument("band_to_band: delta outside [1/2, 2/3]");
  if (p < 1) throw InvalidArgument("band_to_band: empty processor set");
  const double spread = std::pow(static_cast<double>(p), 2.0 - 3.0 * delta);
  if (static_cast<double>(k) > 1.0 + spread + 1e-9)
    throw InvalidArgument("band_to_band: k exceeds 1 + p^(2-3 delta)");
  BandToBandPlan plan;
  plan.n = n;
  plan.b = b;
  plan.h = b / k;
  plan.k = k;
  plan.delta = delta;
  plan.groups = static_cast<int>(n / b);
  plan.group_size = static_cast<int>(static_cast<Index>(p) * b / n);
  if (plan.group_size < 1) throw InvalidArgument("band_to_band: need b >= n / p");
  const double zeta = (1.0 - delta) / delta;
  const double qr = static_cast<double>(plan.group_size) / std::pow(static_cast<double>(k), zeta);
  plan.qr_size = static_cast<int>(pow2_floor(std::max(1.0, qr)));
  plan.qr_size = std::min(plan.qr_size, plan.group_size);
  const double v = std::pow(static_cast<double>(plan.group_size), 2.0 - 3.0 * delta) / (k - 1);
  plan.v = std::max(1, static_cast<int>(std::lround(v)));
  return plan;
}

namespace {

// Lower-band working store: work(d, c) = B(c + d, c) for d <= cap.
struct Work {
  DistMatrix m;
  Index cap;

  void fetch(Transfer& t, DistMatrix& dst, Index r0, Index c0) const {
    for (Index r = 0; r < dst.rows(); ++r)
      for (Index c = 0; c < dst.cols(); ++c) {
        const Index x = r0 + r, y = c0 + c;
        const Index d = std::abs(x - y);
        if (d <= cap) t.copy_element(m, d, std::min(x, y), dst, r, c);
      }
  }
  void store(Transfer& t, const DistMatrix& src, Index r, Index c, Index x, Index y) {
    const Index d = std::abs(x - y);
    if (d <= cap) t.copy_element(src, r, c, m, d, std::min(x, y));
  }
};

void chase(Work& work, const BulgeIndexSet& s, const std::vector<int>& group, const BandToBandPlan& plan) {
  Engine& e = work.m.engine();
  const Index h = s.h;
  const std::vector<int> qr(group.begin(), group.begin() + plan.qr_size);

  DistMatrix p(e, Layout::block_rows(s.n_r, h, qr));
  DistMatrix x(e, Layout::block_rows(s.n_c, s.n_r, group));
  {
    Transfer t(e);
    work.fetch(t, p, s.o_qr_r, s.o_qr_c);
    work.fetch(t, x, s.o_up_c, s.o_qr_r);
    t.commit();
  }

  par::HouseholderQr hq = par::householder_qr(p, qr, plan.delta);
  const DistMatrix& u = hq.factor.u;
  const DistMatrix& tf = hq.factor.t;
  par::MatmulOptions mo;
  mo.v = plan.v;

  // V = -X U T;  V_v += 1/2 U T^T U^T W_v with W_v = -V_v
  const DistMatrix xu = par::par_matmul(x, u, group, mo);
  DistMatrix v(e, Layout::block_rows(s.n_c, h, group));
  par::par_matmul_into(xu, tf, v, 0, 0, -1.0, false, group, plan.v);
  const DistMatrix y = par::par_matmul(Operand::trans(u), Operand(v, s.o_v, 0, s.n_r, h), group, mo);
  const DistMatrix z = par::par_matmul(Operand::trans(tf), y, group, mo);
  par::par_matmul_into(u, z, v, s.o_v, 0, -0.5, true, group, plan.v);

  // X += V U^T, and the reflected rows also get U V_v^T.
  par::par_matmul_into(v, Operand::trans(u), x, 0, 0, 1.0, true, group, plan.v);
  par::par_matmul_into(u, Operand(v, 0, s.o_v, h, s.n_r, true), x, s.o_v, 0, 1.0, true, group, plan.v);

  // [R; 0] in place of the panel.
  DistMatrix rz(e, Layout::single(s.n_r, h, qr[0]));
  copy_into(hq.r.tile(0).view(), rz.tile(0).block(0, 0, h, h));
  Transfer t(e);
  for (Index r = 0; r < s.n_r; ++r)
    for (Index c = 0; c < h; ++c) work.store(t, rz, r, c, s.o_qr_r + r, s.o_qr_c + c);
  for (Index r = 0; r < s.n_c; ++r) {
    const bool reflected = r >= s.o_v && r < s.o_v + s.n_r;
    for (Index c = 0; c < s.n_r; ++c) {
      const Index gx = s.o_up_c + r, gy = s.o_qr_r + c;
      if (reflected && gx < gy) continue;
      work.store(t, x, r, c, gx, gy);
    }
  }
  t.commit();
}

}  // namespace

DistBand band_to_band(const DistBand& band, std::span<const int> procs, int k, double delta) {
  Engine& e = band.store().engine();
  const Index n = band.n(), b = band.bandwidth();
  const BandToBandPlan plan = plan_band_to_band(n, b, static_cast<int>(procs.size()), k, delta);
  const std::vector<int> used(procs.begin(), procs.begin() + plan.groups * plan.group_size);

  Work work{DistMatrix(e, Layout::block_cols(std::min(bulge_capacity(b, k), n - 1) + 1, n, used)),
            std::min(bulge_capacity(b, k), n - 1)};
  {
    Transfer t(e);
    t.copy(band.store(), 0, 0, work.m, 0, 0, b + 1, n);
    t.commit();
  }

  for (const auto& phase : chase_phases(n, b, k)) {
    e.concurrently(static_cast<int>(phase.size()), [&](int branch) {
      const Chase& c = phase[static_cast<std::size_t>(branch)];
      const auto first = used.begin() + (c.j - 1) * plan.group_size;
      const std::vector<int> group(first, first + plan.group_size);
      chase(work, bulge_indices(n, b, k, c.i, c.j), group, plan);
    });
  }

  // Out-of-band leftovers must be roundoff before the representation drops them.
  {
    const Matrix raw = work.m.gather();
    double fill = 0.0, norm = 0.0;
    for (Index d = 0; d <= work.cap; ++d)
      for (Index c = 0; c + d < n; ++c) {
        norm += raw(d, c) * raw(d, c) * (d == 0 ? 1.0 : 2.0);
        if (d > plan.h) fill = std::max(fill, std::abs(raw(d, c)));
      }
    if (!(fill <= 1e3 * kEps * std::sqrt(norm)))
      throw NumericalError("band_to_band: fill outside the band " + std::to_string(fill), fill);
  }

  DistBand out(e, n, plan.h, procs);
  Transfer t(e);
  t.copy(work.m, 0, 0, out.store(), 0, 0, plan.h + 1, n);
  t.commit();
  return out;
}

}  // namespace bspeig::reduce
