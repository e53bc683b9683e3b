#include "bspeig/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "bspeig/bsp/dist_matrix.hpp"
#include "bspeig/errors.hpp"
#include "bspeig/meter.hpp"
#include "bspeig/numeric.hpp"
#include "bspeig/reduce/band_to_band.hpp"
#include "bspeig/reduce/ca_br.hpp"
#include "bspeig/reduce/full_to_band.hpp"

namespace bspeig {

using bsp::Engine;
using bsp::DistMatrix;
using bsp::Layout;
using reduce::DistBand;

const char* stage_name(StageKind kind) {
  switch (kind) {
    case StageKind::full_to_band: return "full_to_band";
    case StageKind::band_to_band: return "band_to_band";
    case StageKind::ca_br: return "ca_br";
    case StageKind::sequential: return "sequential";
  }
  return "?";
}

ReductionSchedule choose_schedule(Index n, int p, double delta) {
  if (p < 1 || !is_pow2(p)) throw InvalidArgument("schedule: p must be a power of two");
  if (n < p) throw InvalidArgument("schedule: n must be at least p");
  if (delta < 0.5 - 1e-12 || delta > 2.0 / 3.0 + 1e-12) throw InvalidArgument("schedule: delta outside [1/2, 2/3]");
  ReductionSchedule s;
  s.n = n;
  s.p = p;
  s.delta = delta;
  s.zeta = (1.0 - delta) / delta;
  const double pd = static_cast<double>(p);
  if (p == 1) {
    s.b = n - 1;
    s.final_b = n - 1;
    s.stages.push_back({StageKind::sequential, n - 1, 0, 1});
    return s;
  }
  const double denom = std::max(std::pow(pd, 2.0 - 3.0 * delta), std::log2(pd));
  const double limit = static_cast<double>(n) / denom;
  Index b = 1;
  while (n % (2 * b) == 0 && static_cast<double>(2 * b) <= limit * (1.0 + 1e-9)) b *= 2;
  s.b = b;
  s.stages.push_back({StageKind::full_to_band, n, b, p});

  const auto p_delta = static_cast<int>(pow2_floor(std::pow(pd, delta)));
  for (int i = 0; b * p_delta > n; ++i) {
    const double shrink = std::pow(static_cast<double>(s.k), i * s.zeta);
    auto procs = static_cast<int>(pow2_floor(pd / shrink));
    procs = static_cast<int>(std::min<Index>(std::max<Index>(procs, n / b), p));
    s.stages.push_back({StageKind::band_to_band, b, b / s.k, procs});
    b /= s.k;
  }
  while (b * p > n && b > 1) {
    s.stages.push_back({StageKind::ca_br, b, b / 2, p_delta});
    b /= 2;
  }
  s.final_b = b;
  s.stages.push_back({StageKind::sequential, b, 0, 1});
  return s;
}

namespace {

// Ascending eigenvalues of the band on proc 0, fully metered there.
std::vector<double> sequential_eigenvalues(const BandMatrix& band, Engine& e) {
  const Meter meter(e, 0);
  Tridiagonal t = band_to_tridiagonal_seq(band, meter);
  return tridiagonal_eigenvalues(std::move(t.diag), std::move(t.offdiag), meter);
}

void check_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("eigensolver: matrix must be square");
  if (a.rows() < 1) throw ShapeError("eigensolver: empty matrix");
  const double tol = 1e-12 * frobenius_norm(a.view());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) throw InvalidArgument("eigensolver: matrix is not symmetric");
}

}  // namespace

EigenResult symmetric_eigenvalues(const Matrix& a, int p_in, const SolverOptions& opts) {
  check_symmetric(a);
  if (p_in < 1) throw InvalidArgument("eigensolver: need at least one processor");
  EigenResult res;
  const int p = static_cast<int>(pow2_floor(p_in));
  if (p != p_in) res.notes.push_back("processor count rounded down to " + std::to_string(p));
  res.procs = p;

  const Index n0 = a.rows();
  const Index n = ceil_div(n0, p) * p;
  res.padding = n - n0;
  Matrix work(n, n);
  copy_into(a.view(), work.block(0, 0, n0, n0));
  for (Index i = n0; i < n; ++i) work(i, i) = 1.0;

  res.schedule = choose_schedule(n, p, opts.delta);
  bsp::MachineParams mp = opts.machine;
  mp.p = p;
  mp.validate();
  Engine e(mp, opts.memory);

  std::size_t mark = 0;
  auto close_stage = [&](const Stage& st, const BandMatrix* band) {
    e.settle();
    const std::size_t now = e.closed_steps();
    StageRecord rec{st, e.ledger().slice(mark, now)};
    mark = now;
    if (band && opts.on_stage) opts.on_stage(rec, *band);
    res.stages.push_back(std::move(rec));
  };
  auto label = [](const Stage& st) {
    return std::string(stage_name(st.kind)) + " b " + std::to_string(st.b_in) + " -> " + std::to_string(st.b_out);
  };

  std::vector<double> eig;
  if (p == 1) {
    const Stage& st = res.schedule.stages.front();
    eig = sequential_eigenvalues(BandMatrix::from_dense(work, std::max<Index>(n - 1, 0)), e);
    close_stage(st, nullptr);
  } else {
    const std::vector<int> all = bsp::iota_procs(0, p);
    std::optional<DistBand> band;
    for (const Stage& st : res.schedule.stages) {
      try {
        const std::vector<int> ids = bsp::iota_procs(0, st.procs);
        switch (st.kind) {
          case StageKind::full_to_band: {
            const bsp::ProcGrid grid = bsp::ProcGrid::for_delta(all, opts.delta);
            const DistMatrix da = DistMatrix::place(e, work, Layout::block_rows(n, n, all));
            reduce::FullToBandOptions fo;
            fo.b = st.b_out;
            band.emplace(reduce::full_to_band(da, grid, fo));
            break;
          }
          case StageKind::band_to_band:
            band.emplace(reduce::band_to_band(*band, ids, res.schedule.k, opts.delta));
            break;
          case StageKind::ca_br:
            band.emplace(reduce::ca_br_halve(*band, ids));
            break;
          case StageKind::sequential:
            eig = sequential_eigenvalues(reduce::gather_band(*band, 0), e);
            break;
        }
      } catch (const NumericalError& ex) {
        throw StageError(label(st), ex.what(), true);
      } catch (const Error& ex) {
        throw StageError(label(st), ex.what(), false);
      }
      if (st.kind == StageKind::sequential) close_stage(st, nullptr);
      else {
        const BandMatrix snapshot = opts.on_stage ? band->gather() : BandMatrix();
        close_stage(st, &snapshot);
      }
    }
  }
  res.ledger = e.ledger();
  for (const std::string& note : e.notes()) res.notes.push_back(note);

  // Drop the padding eigenvalues, the ones closest to 1.
  if (res.padding > 0) {
    std::vector<std::size_t> order(eig.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(eig[x] - 1.0) < std::abs(eig[y] - 1.0); });
    std::vector<bool> drop(eig.size(), false);
    for (Index i = 0; i < res.padding; ++i) drop[order[static_cast<std::size_t>(i)]] = true;
    std::vector<double> kept;
    for (std::size_t i = 0; i < eig.size(); ++i)
      if (!drop[i]) kept.push_back(eig[i]);
    eig = std::move(kept);
  }
  std::sort(eig.begin(), eig.end());
  res.eigenvalues = std::move(eig);
  return res;
}

}  // namespace bspeig
