#include "bspeig/reduce/ca_br.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "bspeig/errors.hpp"
#include "bspeig/meter.hpp"
#include "bspeig/numeric.hpp"

namespace bspeig::reduce {

using bsp::Dist1D;
using bsp::Engine;
using bsp::Layout;
using bsp::Transfer;

std::vector<ScheduledChase> ca_br_schedule(Index n, Index b, int p) {
  if (p < 1) throw InvalidArgument("ca_br: empty processor set");
  const Dist1D cols = Dist1D::blocked(n, p);
  std::vector<int> last_step(static_cast<std::size_t>(n), 0);
  std::vector<int> last_proc(static_cast<std::size_t>(n), -1);
  std::vector<ScheduledChase> out;
  const Index h = b / 2;
  for (int i = 1; i <= n / h - 1; ++i) {
    const int count = chases_in_sweep(n, b, 2, i);
    for (int j = 1; j <= count; ++j) {
      const BulgeIndexSet s = bulge_indices(n, b, 2, i, j);
      const Range f = s.footprint();
      const int proc = cols.part_of(s.o_qr_c);
      int step = 0;
      for (Index x = f.begin; x < f.end; ++x) {
        const auto ux = static_cast<std::size_t>(x);
        if (last_proc[ux] < 0) continue;
        step = std::max(step, last_step[ux] + (last_proc[ux] != proc ? 1 : 0));
      }
      for (Index x = f.begin; x < f.end; ++x) {
        last_step[static_cast<std::size_t>(x)] = step;
        last_proc[static_cast<std::size_t>(x)] = proc;
      }
      out.push_back({{i, j}, proc, step});
    }
  }
  return out;
}

namespace {

// Local copy of whole store columns; entry (x, y) with x >= y lives in column y.
class Window {
 public:
  Window(Engine& e, int proc, Index cap, const std::vector<Range>& parts) : cap_(cap), parts_(parts) {
    for (const Range& r : parts_) blocks_.emplace_back(e, Layout::single(cap + 1, r.size(), proc));
  }
  const std::vector<Range>& parts() const { return parts_; }
  DistMatrix& block(std::size_t i) { return blocks_[i]; }

  double get(Index x, Index y) const {
    if (x < y) std::swap(x, y);
    if (x - y > cap_) return 0.0;
    const auto [b, c] = locate(y);
    return blocks_[b].tile(0)(x - y, c);
  }
  void set(Index x, Index y, double v) {
    if (x < y) std::swap(x, y);
    if (x - y > cap_) return;
    const auto [b, c] = locate(y);
    blocks_[b].tile(0)(x - y, c) = v;
  }

 private:
  std::pair<std::size_t, Index> locate(Index y) const {
    for (std::size_t i = 0; i < parts_.size(); ++i)
      if (y >= parts_[i].begin && y < parts_[i].end) return {i, y - parts_[i].begin};
    throw InvalidArgument("ca_br: column outside the window");
  }

  Index cap_;
  std::vector<Range> parts_;
  std::vector<DistMatrix> blocks_;
};

std::vector<Range> merge(std::vector<Range> rs) {
  std::sort(rs.begin(), rs.end(), [](const Range& a, const Range& b) { return a.begin < b.begin; });
  std::vector<Range> out;
  for (const Range& r : rs) {
    if (!out.empty() && r.begin <= out.back().end) out.back().end = std::max(out.back().end, r.end);
    else out.push_back(r);
  }
  return out;
}

void run_chase(Window& w, const BulgeIndexSet& s, const Meter& meter) {
  Matrix p(s.n_r, s.h), x(s.n_c, s.n_r);
  for (Index r = 0; r < s.n_r; ++r)
    for (Index c = 0; c < s.h; ++c) p(r, c) = w.get(s.o_qr_r + r, s.o_qr_c + c);
  for (Index r = 0; r < s.n_c; ++r)
    for (Index c = 0; c < s.n_r; ++c) x(r, c) = w.get(s.o_up_c + r, s.o_qr_r + c);
  chase_local(p.view(), x.view(), s.o_v, meter);
  for (Index r = 0; r < s.n_r; ++r)
    for (Index c = 0; c < s.h; ++c) w.set(s.o_qr_r + r, s.o_qr_c + c, p(r, c));
  for (Index r = 0; r < s.n_c; ++r) {
    const bool reflected = r >= s.o_v && r < s.o_v + s.n_r;
    for (Index c = 0; c < s.n_r; ++c) {
      const Index gx = s.o_up_c + r, gy = s.o_qr_r + c;
      if (reflected && gx < gy) continue;
      w.set(gx, gy, x(r, c));
    }
  }
}

}  // namespace

DistBand ca_br_halve(const DistBand& band, std::span<const int> procs) {
  Engine& e = band.store().engine();
  const Index n = band.n(), b = band.bandwidth();
  const int p = static_cast<int>(procs.size());
  if (p < 1) throw InvalidArgument("ca_br: empty processor set");
  if (b * p > n) throw InvalidArgument("ca_br: bandwidth exceeds n / p");
  if (b <= 1) {
    DistBand same(e, n, b, procs);
    Transfer t(e);
    t.copy(band.store(), 0, 0, same.store(), 0, 0, b + 1, n);
    t.commit();
    return same;
  }
  if (b % 2 != 0 || n % b != 0) throw InvalidArgument("ca_br: need even b dividing n");

  const Index cap = std::min(bulge_capacity(b, 2), n - 1);
  const std::vector<int> ids(procs.begin(), procs.end());
  DistMatrix work(e, Layout::block_cols(cap + 1, n, ids));
  {
    Transfer t(e);
    t.copy(band.store(), 0, 0, work, 0, 0, b + 1, n);
    t.commit();
  }

  const std::vector<ScheduledChase> plan = ca_br_schedule(n, b, p);
  int steps = 0;
  for (const ScheduledChase& c : plan) steps = std::max(steps, c.step + 1);
  std::vector<std::vector<std::vector<BulgeIndexSet>>> by_step(
      static_cast<std::size_t>(steps), std::vector<std::vector<BulgeIndexSet>>(static_cast<std::size_t>(p)));
  for (const ScheduledChase& c : plan)
    by_step[static_cast<std::size_t>(c.step)][static_cast<std::size_t>(c.proc)].push_back(
        bulge_indices(n, b, 2, c.chase.i, c.chase.j));

  for (const auto& step : by_step) {
    std::map<int, Window> windows;
    Transfer fetch(e);
    for (int r = 0; r < p; ++r) {
      const auto& mine = step[static_cast<std::size_t>(r)];
      if (mine.empty()) continue;
      std::vector<Range> fp;
      for (const BulgeIndexSet& s : mine) fp.push_back(s.footprint());
      Window& w = windows.emplace(r, Window(e, ids[static_cast<std::size_t>(r)], cap, merge(fp))).first->second;
      for (std::size_t i = 0; i < w.parts().size(); ++i)
        fetch.copy(work, 0, w.parts()[i].begin, w.block(i), 0, 0, cap + 1, w.parts()[i].size());
    }
    fetch.commit();

    Transfer back(e);
    for (auto& [r, w] : windows) {
      const Meter meter(e, ids[static_cast<std::size_t>(r)]);
      for (const BulgeIndexSet& s : step[static_cast<std::size_t>(r)]) run_chase(w, s, meter);
      for (std::size_t i = 0; i < w.parts().size(); ++i)
        back.copy(w.block(i), 0, 0, work, 0, w.parts()[i].begin, cap + 1, w.parts()[i].size());
    }
    back.commit();
  }

  DistBand out(e, n, b / 2, procs);
  Transfer t(e);
  t.copy(work, 0, 0, out.store(), 0, 0, b / 2 + 1, n);
  t.commit();
  return out;
}

}  // namespace bspeig::reduce
