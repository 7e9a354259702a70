#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "scatterkit/fft.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/signal.hpp"

// Frequency-domain building blocks of the filter cascade: restricting a
// filter to a coarser grid, subsampling by spectral folding, and the adjoints
// the reverse pass needs.
namespace scatterkit::spectral {

namespace detail {

// For each coarse bin along one axis, the fine bins carrying the same
// physical frequency. The coarse Nyquist bin maps to both +-N/2 with weight
// one half each.
inline std::vector<std::vector<std::pair<std::size_t, double>>> axis_bin_map(std::size_t fine, std::size_t coarse) {
  std::vector<std::vector<std::pair<std::size_t, double>>> map(coarse);
  for (std::size_t i = 0; i < coarse; ++i) {
    const long k = signed_bin(i, coarse);
    if (coarse == fine) {
      map[i].push_back({i, 1.0});
    } else if (coarse >= 2 && k == -static_cast<long>(coarse / 2)) {
      map[i].push_back({wrap_index(k, fine), 0.5});
      map[i].push_back({wrap_index(-k, fine), 0.5});
    } else {
      map[i].push_back({wrap_index(k, fine), 1.0});
    }
  }
  return map;
}

template <typename Visit>
void for_each_bin_pair(const GridShape& fine, const GridShape& coarse, Visit&& visit) {
  if (fine.ndims() != coarse.ndims()) throw DimensionError("bin map across different dimensionality");
  if (fine.ndims() == 1) {
    auto m = axis_bin_map(fine.extent(0), coarse.extent(0));
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (auto [f, w] : m[i]) visit(i, f, w);
    }
    return;
  }
  auto m0 = axis_bin_map(fine.extent(0), coarse.extent(0));
  auto m1 = axis_bin_map(fine.extent(1), coarse.extent(1));
  const std::size_t fc = fine.extent(1), cc = coarse.extent(1);
  for (std::size_t r = 0; r < m0.size(); ++r) {
    for (std::size_t c = 0; c < m1.size(); ++c) {
      for (auto [fr, wr] : m0[r]) {
        for (auto [fcol, wc] : m1[c]) visit(r * cc + c, fr * fc + fcol, wr * wc);
      }
    }
  }
}

}  // namespace detail

// Samples of a filter response on a coarser grid covering the same period,
// i.e. the response at the coarse grid's frequencies.
inline std::vector<cplx> crop_response(std::span<const cplx> fine_response, const GridShape& fine,
                                       const GridShape& coarse) {
  if (fine == coarse) return {fine_response.begin(), fine_response.end()};
  std::vector<cplx> out(coarse.count());
  detail::for_each_bin_pair(fine, coarse, [&](std::size_t ci, std::size_t fi, double w) {
    out[ci] += w * fine_response[fi];
  });
  return out;
}

// Band-limited (trigonometric) interpolation of a signal onto a grid
// `factor` times finer per axis.
inline Signal fourier_upsample(const Signal& x, std::size_t factor) {
  if (factor == 1) return x;
  std::vector<std::size_t> ext;
  for (std::size_t e : x.shape().extents()) ext.push_back(e * factor);
  GridShape fine(ext);
  auto coarse_spec = spectrum(x);
  std::vector<cplx> fine_spec(fine.count());
  const double gain = static_cast<double>(fine.count()) / static_cast<double>(x.size());
  detail::for_each_bin_pair(fine, x.shape(), [&](std::size_t ci, std::size_t fi, double w) {
    fine_spec[fi] += w * gain * coarse_spec[ci];
  });
  return from_spectrum(fine_spec, fine, x.spacing() / static_cast<double>(factor));
}

// DFT of the subsampled signal, from the DFT of the full one:
// Y[k] = factor^-n * sum_m X[k + m N/factor].
inline std::vector<cplx> fold(std::span<const cplx> spec, const GridShape& shape, std::size_t factor) {
  if (factor == 1) return {spec.begin(), spec.end()};
  const GridShape out_shape = shape.subsampled(factor);
  std::vector<cplx> out(out_shape.count());
  const double scale = 1.0 / std::pow(static_cast<double>(factor), static_cast<double>(shape.ndims()));
  if (shape.ndims() == 1) {
    const std::size_t nc = out_shape.extent(0);
    for (std::size_t i = 0; i < spec.size(); ++i) out[i % nc] += spec[i];
  } else {
    const std::size_t rc = out_shape.extent(0), cc = out_shape.extent(1), cols = shape.extent(1);
    for (std::size_t r = 0; r < shape.extent(0); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[(r % rc) * cc + (c % cc)] += spec[r * cols + c];
    }
  }
  for (auto& v : out) v *= scale;
  return out;
}

// Low-pass response for a coarser grid whose spatial kernel is the fine
// kernel sampled at the coarse spacing, rescaled to unit mass. Unlike
// crop_response this keeps a nonnegative kernel nonnegative.
inline std::vector<cplx> fold_lowpass(std::span<const cplx> fine_response, const GridShape& fine,
                                      const GridShape& coarse) {
  if (fine == coarse) return {fine_response.begin(), fine_response.end()};
  auto out = fold(fine_response, fine, fine.extent(0) / coarse.extent(0));
  const cplx dc = out[0];
  for (auto& v : out) v /= dc;
  return out;
}

// Periodic replication of a coarse spectrum onto the fine grid (no scaling).
inline std::vector<cplx> replicate(std::span<const cplx> coarse_spec, const GridShape& coarse, const GridShape& fine) {
  if (coarse == fine) return {coarse_spec.begin(), coarse_spec.end()};
  std::vector<cplx> out(fine.count());
  if (fine.ndims() == 1) {
    const std::size_t nc = coarse.extent(0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = coarse_spec[i % nc];
  } else {
    const std::size_t rc = coarse.extent(0), cc = coarse.extent(1), cols = fine.extent(1);
    for (std::size_t r = 0; r < fine.extent(0); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = coarse_spec[(r % rc) * cc + (c % cc)];
    }
  }
  return out;
}

// y = subsample(IDFT(spec * h), factor); `spec` and `h` live on `shape`,
// whose samples are `spacing` apart.
inline Signal filter_subsample(std::span<const cplx> spec, std::span<const cplx> h, const GridShape& shape,
                               double spacing, std::size_t factor) {
  std::vector<cplx> prod(spec.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = spec[i] * h[i];
  const GridShape out_shape = shape.subsampled(factor);
  auto folded = fold(prod, shape, factor);
  fft::inverse(folded, out_shape);
  return Signal(out_shape, std::move(folded), spacing * static_cast<double>(factor));
}

// Adjoint of filter_subsample with respect to the input samples, under the
// real inner product Re<a, b>: returns IDFT(conj(h) * replicate(DFT(g))).
inline std::vector<cplx> filter_subsample_adjoint(std::span<const cplx> g, const GridShape& out_shape,
                                                  std::span<const cplx> h, const GridShape& shape) {
  auto gs = fft::forward_copy(g, out_shape);
  auto z = replicate(gs, out_shape, shape);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= std::conj(h[i]);
  fft::inverse(z, shape);
  return z;
}

}  // namespace scatterkit::spectral
