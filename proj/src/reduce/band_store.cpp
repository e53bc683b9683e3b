#include "bspeig/reduce/band_store.hpp"

#include "bspeig/errors.hpp"

namespace bspeig::reduce {

using bsp::Layout;

DistBand::DistBand(bsp::Engine& engine, Index n, Index b, std::span<const int> procs)
    : n_(n), b_(b), store_(engine, Layout::block_cols(b + 1, n, procs)) {
  if (n < 1 || b < 0 || b >= n)
    throw InvalidArgument("band: bandwidth must lie in [0, n)");
}

DistBand DistBand::place(bsp::Engine& engine, const BandMatrix& band, std::span<const int> procs) {
  DistBand out(engine, band.n(), band.bandwidth(), procs);
  Matrix raw(band.bandwidth() + 1, band.n());
  for (Index d = 0; d <= band.bandwidth(); ++d)
    for (Index j = 0; j + d < band.n(); ++j) raw(d, j) = band.diag(d, j);
  out.store_ = DistMatrix::place(engine, raw, out.store_.layout());
  return out;
}

BandMatrix DistBand::gather() const {
  const Matrix raw = store_.gather();
  BandMatrix band(n_, b_);
  for (Index d = 0; d <= b_; ++d)
    for (Index j = 0; j + d < n_; ++j) band.diag(d, j) = raw(d, j);
  return band;
}

BandMatrix gather_band(const DistBand& band, int root) {
  DistMatrix here = bsp::redistribute(band.store(), Layout::single(band.bandwidth() + 1, band.n(), root));
  const Matrix& raw = here.tile(0);
  BandMatrix out(band.n(), band.bandwidth());
  for (Index d = 0; d <= band.bandwidth(); ++d)
    for (Index j = 0; j + d < band.n(); ++j) out.diag(d, j) = raw(d, j);
  return out;
}

}  // namespace bspeig::reduce
