#include "bspeig/reduce/full_to_band.hpp"

#include <cmath>
#include <string>

#include "bspeig/errors.hpp"
#include "bspeig/numeric.hpp"
#include "bspeig/par/matmul.hpp"
#include "bspeig/par/qr.hpp"

namespace bspeig::reduce {

using bsp::Engine;
using bsp::Layout;
using bsp::ProcGrid;
using bsp::Transfer;
using par::Operand;

namespace {

double grid_delta(const ProcGrid& g) {
  const double p = static_cast<double>(g.size());
  if (g.size() <= 1) return 0.5;
  return std::log(static_cast<double>(g.q) * g.c) / std::log(p);
}

}  // namespace

FullToBandPlan plan_full_to_band(Index n, const ProcGrid& grid, const FullToBandOptions& opts) {
  FullToBandPlan plan;
  plan.n = n;
  plan.b = opts.b;
  plan.q = grid.q;
  plan.c = grid.c;
  if (n < 1) throw ShapeError("full_to_band: empty matrix");
  if (opts.b < 1 || opts.b > n) throw InvalidArgument("full_to_band: b must lie in [1, n]");
  if (n % opts.b != 0) throw InvalidArgument("full_to_band: n mod b must be 0");
  if (opts.b % grid.q != 0) throw InvalidArgument("full_to_band: b mod q must be 0");

  const double p = static_cast<double>(grid.size());
  const double delta = grid_delta(grid);
  const double bd = static_cast<double>(opts.b), nd = static_cast<double>(n);
  const double pd = static_cast<double>(grid.q) * grid.c;
  const double lg = std::log2(p);
  plan.in_range = bd * pd >= nd * (1.0 - 1e-12) && (grid.size() == 1 || bd * lg <= nd * (1.0 + 1e-12));

  if (opts.z > 0) {
    plan.z = opts.z;
  } else {
    const double z = std::pow(std::max(1.0, bd * pd / nd), (1.0 - delta) / delta);
    plan.z = static_cast<int>(pow2_floor(z));
  }
  plan.z = std::clamp(plan.z, 1, grid.q);
  const double spread = std::pow(p, 2.0 - 3.0 * delta);
  plan.w = opts.w > 0 ? opts.w : static_cast<int>(std::max(1.0, std::floor(bd * spread / nd)));
  plan.w = std::clamp(plan.w, 1, grid.q);
  plan.v = std::max(1, static_cast<int>(std::lround(spread)));
  return plan;
}

DistBand full_to_band(const DistMatrix& a, const ProcGrid& grid, const FullToBandOptions& opts,
                      const AggregatedUpdate* update) {
  Engine& e = a.engine();
  const Index n = a.rows();
  if (a.cols() != n) throw ShapeError("full_to_band: matrix must be square");
  grid.validate();
  const FullToBandPlan plan = plan_full_to_band(n, grid, opts);
  const Index b = plan.b;
  if (!plan.in_range)
    e.note("full_to_band: b = " + std::to_string(b) + " outside [n / p^delta, n / log2 p]; continuing");
  const double delta = grid_delta(grid);
  const std::vector<int>& ids = grid.ids;
  const std::vector<int> qr_procs = grid.column_subgrid(plan.z);
  const par::StreamingOptions sopts{plan.w};

  DistMatrix arep = bsp::redistribute(a, Layout::replicated_cyclic(n, n, grid));

  Index m = 0;
  if (update) {
    m = update->u.cols();
    if (update->v.cols() != m || update->u.rows() != n || update->v.rows() != n)
      throw ShapeError("full_to_band: update must be two n x m matrices");
    if (m % grid.q != 0) throw InvalidArgument("full_to_band: update width must be a multiple of q");
  }
  const Layout urep = Layout::replicated_cyclic(n, m + n - b, grid);
  DistMatrix uall(e, urep), vall(e, urep);
  if (update && m > 0) {
    Transfer t(e);
    t.copy(update->u, 0, 0, uall, 0, 0, n, m);
    t.copy(update->v, 0, 0, vall, 0, 0, n, m);
    t.commit();
  }

  DistBand band(e, n, std::min(b, n - 1), ids);
  for (Index o = 0; o < n; o += b) {
    const Index N = n - o;

    // Left-looking panel update: [A11; A21] + U0 V0_1^T + V0 U0_1^T.
    DistMatrix panel(e, Layout::block_rows(N, b, qr_procs));
    {
      std::optional<DistMatrix> upd;
      if (m > 0) {
        const DistMatrix u0 = uall.slice(o, 0, N, m), v0 = vall.slice(o, 0, N, m);
        const DistMatrix uv = bsp::hstack_cyclic({&u0, &v0});
        const DistMatrix v01t = vall.slice(o, 0, b, m).transposed();
        const DistMatrix u01t = uall.slice(o, 0, b, m).transposed();
        const DistMatrix* stack[] = {&v01t, &u01t};
        upd = par::streaming_mm(uv, stack, sopts);
      }
      Transfer t(e);
      t.copy(arep, o, o, panel, 0, 0, N, b);
      if (upd) t.add(*upd, 0, 0, panel, 0, 0, N, b);
      t.commit();
    }

    if (N == b) {
      Transfer t(e);
      for (Index j = 0; j < b; ++j)
        for (Index i = j; i < b; ++i) t.copy_element(panel, i, j, band.store(), i - j, o + j);
      t.commit();
      break;
    }

    const Index rest = N - b;
    par::HouseholderQr hq = par::householder_qr(panel.slice(b, 0, rest, b), qr_procs, delta);
    const DistMatrix& u1 = hq.factor.u;
    const DistMatrix& tf = hq.factor.t;

    // X = [V0_2 | U0_2]^T U1
    std::optional<DistMatrix> u02, v02, x;
    if (m > 0) {
      u02.emplace(uall.slice(o + b, 0, rest, m));
      v02.emplace(vall.slice(o + b, 0, rest, m));
      const DistMatrix vu = bsp::hstack_cyclic({&*v02, &*u02}).transposed();
      x = par::streaming_mm(vu, u1, sopts);
    }

    // W = A22 U1 + U0_2 (V0_2^T U1) + V0_2 (U0_2^T U1)
    const DistMatrix a22 = arep.slice(o + b, o + b, rest, rest);
    std::vector<const DistMatrix*> wide{&a22};
    std::vector<const DistMatrix*> tall{&u1};
    if (m > 0) {
      wide.push_back(&*u02);
      wide.push_back(&*v02);
      tall.push_back(&*x);
    }
    std::optional<DistMatrix> joined;
    if (wide.size() > 1) joined.emplace(bsp::hstack_cyclic(wide));
    const DistMatrix w = par::streaming_mm(joined ? *joined : a22, tall, sopts);
    joined.reset();
    x.reset();

    // V1 = 1/2 U1 (T^T (U1^T (W T))) - W T
    DistMatrix v1(e, Layout::block_rows(rest, b, ids));
    par::par_matmul_into(w, tf, v1, 0, 0, -1.0, false, ids, plan.v);
    par::MatmulOptions mo;
    mo.v = plan.v;
    const DistMatrix y = par::par_matmul(Operand::trans(u1), v1, ids, mo);
    const DistMatrix zz = par::par_matmul(Operand::trans(tf), y, ids, mo);
    par::par_matmul_into(u1, zz, v1, 0, 0, -0.5, true, ids, plan.v);

    // Replicate U1, V1 and write the finished band columns.
    {
      Transfer t(e);
      t.copy(u1, 0, 0, uall, o + b, m, rest, b);
      t.copy(v1, 0, 0, vall, o + b, m, rest, b);
      for (Index j = 0; j < b; ++j) {
        for (Index i = j; i < b; ++i) t.copy_element(panel, i, j, band.store(), i - j, o + j);
        for (Index i = 0; i <= j; ++i) t.copy_element(hq.r, i, j, band.store(), b + i - j, o + j);
      }
      t.commit();
    }
    m += b;
  }
  return band;
}

}  // namespace bspeig::reduce
