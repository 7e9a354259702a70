#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/kernel.hpp"
#include "scatterkit/parallel.hpp"

namespace scatterkit {

// Shape parameters of the Morlet bank, expressed for the scale-0 mother
// wavelet; scale j dilates every spatial width by 2^j.
struct BankParams {
  double sigma = 0.3;                      // spatial std of the wavelet envelope (2D)
  double xi = 1.8 * std::numbers::pi;      // centre frequency in rad/sample of the mother wavelet
  double phi_sigma = 0.3;                  // spatial std of the low-pass phi_0
  double slant = 1.0;                      // 2D: across/along envelope ratio, < 1 elongates the wavelet
  double bandwidth = 0.6;                  // 1D: frequency std / centre frequency for one band per octave
  double frame_floor = 0.5;                // minimum accepted lower frame bound A
  double cascade_threshold = 1e-3;         // relative deconvolution threshold eta for w_{j,k}

  static BankParams defaults_2d(int K) {
    BankParams p;
    p.slant = std::clamp(4.0 / static_cast<double>(std::max(K, 1)), 0.5, 1.0);
    return p;
  }

  static BankParams defaults_1d() {
    BankParams p;
    p.xi = 2.0 * std::numbers::pi;
    p.phi_sigma = 0.26;
    return p;
  }
};

// Low-pass phi_J plus the band-pass wavelets psi_{j,k} (1 <= j <= J,
// 0 <= k < K) stored as DFT samples, the low-pass ladder phi_0..phi_J and the
// cascade filters w_{j,k} with phi_j = w_{j,low} * phi_{j-1} and
// psi_{j,k} = w_{j,k} * phi_{j-1}.
struct FilterBank {
  GridShape shape;
  int J = 0;
  int K = 0;
  BankParams params;
  FrequencyKernel phi;
  std::vector<FrequencyKernel> lowpass;       // phi_0 .. phi_J
  std::vector<FrequencyKernel> psi;           // (j-1)*K + k
  std::vector<FrequencyKernel> cascade_low;   // w_{j,low}, index j-1
  std::vector<FrequencyKernel> cascade_band;  // w_{j,k}, (j-1)*K + k
  double normalization = 1.0;                 // common gain applied to every psi
  double frame_lower = 0.0;
  double frame_upper = 0.0;
  std::vector<double> frame_lower_frequency;  // where A is attained, rad/sample per axis

  std::size_t ndims() const { return shape.ndims(); }

  const FrequencyKernel& wavelet(int j, int k) const {
    if (j < 1 || j > J || k < 0 || k >= K) {
      throw ScaleError("no wavelet (" + std::to_string(j) + "," + std::to_string(k) + ") in bank");
    }
    return psi[static_cast<std::size_t>((j - 1) * K + k)];
  }
};

struct CascadeFilters {
  std::vector<FrequencyKernel> low;   // w_{j,low}, index j-1
  std::vector<FrequencyKernel> band;  // w_{j,k}, (j-1)*K + k
};

namespace detail {

inline std::vector<double> axis_frequencies(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 2.0 * std::numbers::pi * static_cast<double>(signed_bin(i, n)) / static_cast<double>(n);
  }
  return w;
}

// Number of 2*pi images needed so that a Gaussian of spatial std `sigma`
// centred at |centre| has negligible mass beyond them.
inline int image_count(double sigma, double centre) {
  const double reach = std::sqrt(2.0 * 40.0) / sigma + std::numbers::pi + std::abs(centre);
  return static_cast<int>(std::ceil(reach / (2.0 * std::numbers::pi)));
}

// Periodized Gaussian bump exp(-0.5 (w-c)^T P (w-c)) on the DFT grid, where
// P is the spatial covariance (frequency-domain precision). Images at every
// multiple of 2*pi are summed.
inline std::vector<double> periodized_gaussian(const GridShape& shape, const std::array<double, 2>& centre,
                                               const std::array<double, 3>& cov, int images) {
  std::vector<double> out(shape.count());
  const double two_pi = 2.0 * std::numbers::pi;
  if (shape.ndims() == 1) {
    auto w = axis_frequencies(shape.extent(0));
    for (std::size_t i = 0; i < w.size(); ++i) {
      double acc = 0.0;
      for (int m = -images; m <= images; ++m) {
        const double d = w[i] + two_pi * m - centre[0];
        acc += std::exp(-0.5 * cov[0] * d * d);
      }
      out[i] = acc;
    }
    return out;
  }
  auto w0 = axis_frequencies(shape.extent(0));
  auto w1 = axis_frequencies(shape.extent(1));
  parallel_for(w0.size(), [&](std::size_t r) {
    for (std::size_t c = 0; c < w1.size(); ++c) {
      double acc = 0.0;
      for (int a = -images; a <= images; ++a) {
        const double d0 = w0[r] + two_pi * a - centre[0];
        for (int b = -images; b <= images; ++b) {
          const double d1 = w1[c] + two_pi * b - centre[1];
          acc += std::exp(-0.5 * (cov[0] * d0 * d0 + 2.0 * cov[1] * d0 * d1 + cov[2] * d1 * d1));
        }
      }
      out[r * w1.size() + c] = acc;
    }
  });
  return out;
}

// Morlet response: Gabor bump minus the Gaussian envelope scaled so the DC
// bin of the periodized response is exactly zero.
inline std::vector<cplx> morlet_response(const GridShape& shape, const std::array<double, 2>& centre,
                                         const std::array<double, 3>& cov, double min_sigma) {
  const int images = image_count(min_sigma, std::hypot(centre[0], centre[1]));
  auto gabor = periodized_gaussian(shape, centre, cov, images);
  auto envelope = periodized_gaussian(shape, {0.0, 0.0}, cov, images);
  const double beta = gabor[0] / envelope[0];
  std::vector<cplx> out(gabor.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = gabor[i] - beta * envelope[i];
  out[0] = 0.0;
  return out;
}

// Unit-mass isotropic Gaussian low-pass of spatial std `sigma`. Along an axis
// no longer than the kernel's width (2^j >= extent) the kernel is the exact
// mean, so phi for a full-grid J computes the global average.
inline std::vector<cplx> lowpass_response(const GridShape& shape, double sigma, std::size_t width) {
  std::vector<std::vector<double>> factors;
  for (std::size_t axis = 0; axis < shape.ndims(); ++axis) {
    const std::size_t n = shape.extent(axis);
    std::vector<double> f(n, 0.0);
    if (width >= n) {
      f[0] = 1.0;
    } else {
      auto w = axis_frequencies(n);
      const int images = image_count(sigma, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int m = -images; m <= images; ++m) {
          const double d = w[i] + 2.0 * std::numbers::pi * m;
          acc += std::exp(-0.5 * sigma * sigma * d * d);
        }
        f[i] = acc;
      }
      const double dc = f[0];
      for (auto& v : f) v /= dc;
    }
    factors.push_back(std::move(f));
  }
  std::vector<cplx> out(shape.count());
  if (shape.ndims() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = factors[0][i];
  } else {
    const std::size_t cols = shape.extent(1);
    for (std::size_t r = 0; r < shape.extent(0); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = factors[0][r] * factors[1][c];
    }
  }
  return out;
}

// Index of the bin at -omega.
inline std::size_t mirror_bin(const GridShape& shape, std::size_t i) {
  if (shape.ndims() == 1) return wrap_index(-static_cast<long>(i), shape.extent(0));
  const std::size_t cols = shape.extent(1);
  const std::size_t r = i / cols, c = i % cols;
  return wrap_index(-static_cast<long>(r), shape.extent(0)) * cols + wrap_index(-static_cast<long>(c), cols);
}

inline std::vector<double> bin_frequency(const GridShape& shape, std::size_t i) {
  std::vector<double> w;
  std::size_t rest = i;
  std::vector<std::size_t> idx(shape.ndims());
  for (std::size_t a = shape.ndims(); a-- > 0;) {
    idx[a] = rest % shape.extent(a);
    rest /= shape.extent(a);
  }
  for (std::size_t a = 0; a < shape.ndims(); ++a) {
    w.push_back(2.0 * std::numbers::pi * static_cast<double>(signed_bin(idx[a], shape.extent(a))) /
                static_cast<double>(shape.extent(a)));
  }
  return w;
}

// Symmetrized wavelet energy 1/2 sum (|psi(w)|^2 + |psi(-w)|^2).
inline std::vector<double> wavelet_energy(const GridShape& shape, const std::vector<FrequencyKernel>& psi) {
  std::vector<double> e(shape.count(), 0.0);
  for (const auto& k : psi) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      e[i] += 0.5 * (std::norm(k.response[i]) + std::norm(k.response[mirror_bin(shape, i)]));
    }
  }
  return e;
}

inline FrequencyKernel deconvolve(const FrequencyKernel& target, const FrequencyKernel& base, double threshold) {
  FrequencyKernel w{target.shape, std::vector<cplx>(target.response.size()), target.kind, target.scale, target.band};
  const double eta = threshold * base.max_magnitude();
  double covered = 0.0, total = 0.0;
  for (std::size_t i = 0; i < w.response.size(); ++i) {
    const double e = std::norm(target.response[i]);
    total += e;
    if (std::abs(base.response[i]) > eta) {
      w.response[i] = target.response[i] / base.response[i];
      covered += e;
    }
  }
  if (total > 0.0 && (total - covered) > 0.01 * total) {
    std::ostringstream msg;
    msg << "cascade filter w_{" << target.scale << "," << target.band << "} leaves "
        << 100.0 * (total - covered) / total << "% of the target energy uncovered";
    throw CascadeAccuracyError(msg.str());
  }
  return w;
}

// Measures the frame bounds of already normalized wavelets and builds the
// cascade filters.
inline void seal_bank(FilterBank& bank) {
  const GridShape& shape = bank.shape;
  const auto energy = wavelet_energy(shape, bank.psi);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::size_t lo_at = 0;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    const double lp = std::norm(bank.phi.response[i]) + energy[i];
    if (lp < lo) {
      lo = lp;
      lo_at = i;
    }
    hi = std::max(hi, lp);
  }
  bank.frame_lower = lo;
  bank.frame_upper = hi;
  bank.frame_lower_frequency = bin_frequency(shape, lo_at);
  if (lo < bank.params.frame_floor) {
    std::ostringstream msg;
    msg << "lower frame bound " << lo << " below " << bank.params.frame_floor << " at frequency (";
    for (std::size_t a = 0; a < bank.frame_lower_frequency.size(); ++a) {
      msg << (a ? ", " : "") << bank.frame_lower_frequency[a];
    }
    msg << ") rad/sample";
    throw FrameError(msg.str());
  }
  bank.cascade_low.clear();
  bank.cascade_band.clear();
  for (int j = 1; j <= bank.J; ++j) {
    const auto& base = bank.lowpass[static_cast<std::size_t>(j - 1)];
    bank.cascade_low.push_back(deconvolve(bank.lowpass[static_cast<std::size_t>(j)], base, bank.params.cascade_threshold));
    for (int k = 0; k < bank.K; ++k) {
      bank.cascade_band.push_back(deconvolve(bank.wavelet(j, k), base, bank.params.cascade_threshold));
    }
  }
}

// Normalizes the wavelets so the Littlewood-Paley sum peaks at 1, then seals.
inline void finalize_bank(FilterBank& bank) {
  auto raw = wavelet_energy(bank.shape, bank.psi);
  double gain2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] > 1e-300) gain2 = std::min(gain2, (1.0 - std::norm(bank.phi.response[i])) / raw[i]);
  }
  if (!std::isfinite(gain2) || gain2 <= 0.0) throw FrameError("wavelets carry no energy on this grid");
  bank.normalization = std::sqrt(gain2);
  for (auto& k : bank.psi) {
    for (auto& v : k.response) v *= bank.normalization;
  }
  seal_bank(bank);
}

inline void validate_scales(const GridShape& shape, int J, int K) {
  if (J < 1) throw ScaleError("J must be at least 1");
  if (K < 1) throw ScaleError("K must be at least 1");
  if (J >= 30 || (std::size_t{1} << J) > shape.min_extent()) {
    throw ScaleError("2^J = 2^" + std::to_string(J) + " exceeds the smallest grid extent of " + shape.str());
  }
}

inline void build_lowpass_ladder(FilterBank& bank) {
  bank.lowpass.clear();
  for (int j = 0; j <= bank.J; ++j) {
    const double sigma = bank.params.phi_sigma * std::ldexp(1.0, j);
    bank.lowpass.push_back(FrequencyKernel{bank.shape, lowpass_response(bank.shape, sigma, std::size_t{1} << j),
                                           KernelKind::low_pass, j, -1});
  }
  bank.phi = bank.lowpass.back();
}

}  // namespace detail

// 2D Morlet bank: K orientations at angles pi k / K, scales 1..J, Gaussian
// low-pass of width proportional to 2^J.
inline FilterBank build_morlet_2d(const GridShape& shape, int J, int K, const BankParams& params) {
  if (shape.ndims() != 2) throw DimensionError("build_morlet_2d needs a 2D grid, got " + shape.str());
  detail::validate_scales(shape, J, K);
  FilterBank bank;
  bank.shape = shape;
  bank.J = J;
  bank.K = K;
  bank.params = params;
  detail::build_lowpass_ladder(bank);
  bank.psi.resize(static_cast<std::size_t>(J * K));
  parallel_for(bank.psi.size(), [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / K + 1;
    const int k = static_cast<int>(idx) % K;
    const double s = params.sigma * std::ldexp(1.0, j);
    const double xi = params.xi * std::ldexp(1.0, -j);
    const double theta = std::numbers::pi * k / K;
    const double ct = std::cos(theta), st = std::sin(theta);
    // Covariance R diag(s^2, s^2/slant^2) R^T.
    const double a = s * s, b = s * s / (params.slant * params.slant);
    const std::array<double, 3> cov{a * ct * ct + b * st * st, (a - b) * ct * st, a * st * st + b * ct * ct};
    const double min_sigma = s * std::min(1.0, 1.0 / params.slant);
    bank.psi[idx] = FrequencyKernel{shape, detail::morlet_response(shape, {xi * ct, xi * st}, cov, min_sigma),
                                    KernelKind::band_pass, j, k};
  });
  detail::finalize_bank(bank);
  return bank;
}

// 1D bank with K log-spaced bands per octave: centre frequencies
// xi 2^-j 2^-k/K and constant relative bandwidth.
inline FilterBank build_bank_1d(const GridShape& shape, int J, int K, const BankParams& params) {
  if (shape.ndims() != 1) throw DimensionError("build_bank_1d needs a 1D grid, got " + shape.str());
  detail::validate_scales(shape, J, K);
  FilterBank bank;
  bank.shape = shape;
  bank.J = J;
  bank.K = K;
  bank.params = params;
  detail::build_lowpass_ladder(bank);
  const double q = params.bandwidth * 2.0 * (1.0 - std::exp2(-1.0 / K));
  bank.psi.resize(static_cast<std::size_t>(J * K));
  parallel_for(bank.psi.size(), [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / K + 1;
    const int k = static_cast<int>(idx) % K;
    const double xi = params.xi * std::ldexp(1.0, -j) * std::exp2(-static_cast<double>(k) / K);
    const double s = 1.0 / (xi * q);
    bank.psi[idx] = FrequencyKernel{shape, detail::morlet_response(shape, {xi, 0.0}, {s * s, 0.0, 0.0}, s),
                                    KernelKind::band_pass, j, k};
  });
  detail::finalize_bank(bank);
  return bank;
}

// Default-parameter bank for the grid's dimensionality.
inline FilterBank build_bank(const GridShape& shape, int J, int K) {
  return shape.ndims() == 2 ? build_morlet_2d(shape, J, K, BankParams::defaults_2d(K))
                            : build_bank_1d(shape, J, K, BankParams::defaults_1d());
}

inline CascadeFilters cascade_filters(const FilterBank& bank) { return {bank.cascade_low, bank.cascade_band}; }

// |phi_J(w)|^2 + 1/2 sum_{j,k} (|psi_{j,k}(w)|^2 + |psi_{j,k}(-w)|^2).
inline std::vector<double> littlewood_paley(const FilterBank& bank) {
  auto lp = detail::wavelet_energy(bank.shape, bank.psi);
  for (std::size_t i = 0; i < lp.size(); ++i) lp[i] += std::norm(bank.phi.response[i]);
  return lp;
}

}  // namespace scatterkit
