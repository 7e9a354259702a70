#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/filterbank.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/signal.hpp"
#include "scatterkit/spectral.hpp"

namespace scatterkit {

// Oversampling value that disables all subsampling.
inline constexpr int kUnsubsampled = 64;

// Sampling stride for data at scale 2^j when `oversampling` extra dyadic
// levels are retained.
inline std::size_t scale_stride(int j, int oversampling) {
  return oversampling >= j ? std::size_t{1} : std::size_t{1} << (j - oversampling);
}

struct WaveletBand {
  int j = 0;
  int k = 0;
  Signal coeffs;
};

// Wx = {x * phi_J, x * psi_{j,k}}, each grid subsampled according to the
// oversampling setting.
struct WaveletCoefficients {
  int J = 0;
  int oversampling = 0;
  bool real_input = true;
  Signal low;
  std::vector<WaveletBand> bands;

  double norm_squared() const {
    double acc = low.norm_squared();
    for (const auto& b : bands) acc += b.coeffs.norm_squared();
    return acc;
  }
};

inline double distance(const WaveletCoefficients& a, const WaveletCoefficients& b) {
  double acc = distance(a.low, b.low);
  acc *= acc;
  for (std::size_t i = 0; i < a.bands.size(); ++i) {
    const double d = distance(a.bands[i].coeffs, b.bands.at(i).coeffs);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline WaveletCoefficients forward(const Signal& x, const FilterBank& bank, int oversampling = 1) {
  require_same_shape(x.shape(), bank.shape, "wavelet forward");
  if (oversampling < 0) throw DomainError("oversampling must be >= 0");
  const auto spec = spectrum(x);
  WaveletCoefficients out;
  out.J = bank.J;
  out.oversampling = oversampling;
  out.real_input = x.is_real();
  out.low = spectral::filter_subsample(spec, bank.phi.response, x.shape(), x.spacing(),
                                       scale_stride(bank.J, oversampling));
  out.bands.resize(bank.psi.size());
  parallel_for(bank.psi.size(), [&](std::size_t i) {
    const auto& h = bank.psi[i];
    out.bands[i] = WaveletBand{h.scale, h.band,
                               spectral::filter_subsample(spec, h.response, x.shape(), x.spacing(),
                                                          scale_stride(h.scale, oversampling))};
  });
  return out;
}

// Fast multiscale cascade: x_0 = x * phi_0, then for j = 1..J
// x_j(., k) = x_{j-1}(., low) * w_{j,k}. Each x_j(., low) is subsampled
// according to `oversampling`, filters are restricted to the coarse grid.
inline WaveletCoefficients cascade_forward(const Signal& x, const FilterBank& bank, int oversampling = kUnsubsampled) {
  require_same_shape(x.shape(), bank.shape, "cascade forward");
  WaveletCoefficients out;
  out.J = bank.J;
  out.oversampling = oversampling;
  out.real_input = x.is_real();
  Signal approx = convolve(x, bank.lowpass[0]);
  std::size_t stride = 1;
  for (int j = 1; j <= bank.J; ++j) {
    const GridShape& level = approx.shape();
    const auto spec = spectrum(approx);
    const std::size_t next = scale_stride(j, oversampling);
    for (int k = 0; k < bank.K; ++k) {
      const auto& w = bank.cascade_band[static_cast<std::size_t>((j - 1) * bank.K + k)];
      auto h = spectral::crop_response(w.response, bank.shape, level);
      out.bands.push_back({j, k, spectral::filter_subsample(spec, h, level, approx.spacing(), next / stride)});
    }
    auto h = spectral::crop_response(bank.cascade_low[static_cast<std::size_t>(j - 1)].response, bank.shape, level);
    approx = spectral::filter_subsample(spec, h, level, approx.spacing(), next / stride);
    stride = next;
  }
  out.low = std::move(approx);
  return out;
}

// Dual-frame reconstruction by division with the Littlewood-Paley sum.
// Subsampled coefficient grids are first brought back to full resolution by
// band-limited interpolation, so their aliasing error carries over.
inline Signal inverse(const WaveletCoefficients& c, const FilterBank& bank) {
  if (bank.frame_lower < bank.params.frame_floor) {
    throw FrameError("bank lower frame bound " + std::to_string(bank.frame_lower) + " is below the gate");
  }
  if (c.bands.size() != bank.psi.size()) throw DimensionError("coefficients do not match the bank");
  const GridShape& shape = bank.shape;
  auto full_spectrum = [&](const Signal& s) {
    const std::size_t factor = shape.extent(0) / s.shape().extent(0);
    return spectrum(spectral::fourier_upsample(s, factor));
  };
  std::vector<cplx> acc(shape.count());
  {
    auto s = full_spectrum(c.low);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::conj(bank.phi.response[i]) * s[i];
  }
  for (std::size_t b = 0; b < c.bands.size(); ++b) {
    auto s = full_spectrum(c.bands[b].coeffs);
    const auto& h = bank.psi[b].response;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::conj(h[i]) * s[i];
  }
  const double spacing = c.low.spacing() / static_cast<double>(shape.extent(0) / c.low.shape().extent(0));
  std::vector<cplx> rec(shape.count());
  if (c.real_input) {
    // Real input: X(w) = (R(w) + conj R(-w)) / (2 LP(w)), with the symmetrized sum LP >= A.
    const auto lp = littlewood_paley(bank);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      rec[i] = (acc[i] + std::conj(acc[detail::mirror_bin(shape, i)])) / (2.0 * lp[i]);
    }
    Signal out = from_spectrum(rec, shape, spacing);
    for (auto& v : out.samples()) v = v.real();
    return out;
  }
  std::vector<double> d(shape.count());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = std::norm(bank.phi.response[i]);
    for (const auto& h : bank.psi) d[i] += std::norm(h.response[i]);
    if (d[i] < bank.params.frame_floor) {
      throw FrameError("complex input: one-sided filter energy " + std::to_string(d[i]) +
                       " is below the gate; analytic banks only invert real signals");
    }
    rec[i] = acc[i] / d[i];
  }
  return from_spectrum(rec, shape, spacing);
}

// Phi_J x = x * phi_J, subsampled like the low-pass output of forward().
inline Signal average(const Signal& x, const FilterBank& bank, int oversampling = 1) {
  require_same_shape(x.shape(), bank.shape, "average");
  return spectral::filter_subsample(spectrum(x), bank.phi.response, x.shape(), x.spacing(),
                                    scale_stride(bank.J, oversampling));
}

}  // namespace scatterkit
