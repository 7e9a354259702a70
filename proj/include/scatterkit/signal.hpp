#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/fft.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/kernel.hpp"

namespace scatterkit {

// Samples of a periodic function x(u) on a power-of-two grid, row-major.
// `spacing` is the distance between samples in units of u, so
// ||x||^2 = sum |x(u)|^2 * spacing^ndims approximates the L2 integral and is
// comparable between a grid and its subsampled versions.
class Signal {
 public:
  Signal() = default;

  explicit Signal(GridShape shape, double spacing = 1.0)
      : shape_(std::move(shape)), samples_(shape_.count()), spacing_(spacing) {}

  Signal(GridShape shape, std::vector<cplx> samples, double spacing = 1.0)
      : shape_(std::move(shape)), samples_(std::move(samples)), spacing_(spacing) {
    if (samples_.size() != shape_.count()) {
      throw DimensionError("signal has " + std::to_string(samples_.size()) + " samples for grid " + shape_.str());
    }
    if (!(spacing_ > 0.0)) throw DimensionError("sample spacing must be positive");
  }

  static Signal from_real(GridShape shape, std::span<const double> values, double spacing = 1.0) {
    std::vector<cplx> s(values.begin(), values.end());
    return Signal(std::move(shape), std::move(s), spacing);
  }

  const GridShape& shape() const { return shape_; }
  std::size_t ndims() const { return shape_.ndims(); }
  std::size_t size() const { return samples_.size(); }
  double spacing() const { return spacing_; }
  double cell_volume() const { return std::pow(spacing_, static_cast<double>(shape_.ndims())); }

  std::span<const cplx> samples() const { return samples_; }
  std::span<cplx> samples() { return samples_; }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }
  cplx& operator[](std::size_t i) { return samples_[i]; }
  cplx& at(std::size_t r, std::size_t c) { return samples_[r * shape_.extent(1) + c]; }
  const cplx& at(std::size_t r, std::size_t c) const { return samples_[r * shape_.extent(1) + c]; }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& v : samples_) acc += std::norm(v);
    return acc * cell_volume();
  }
  double norm() const { return std::sqrt(norm_squared()); }

  bool is_real(double tol = 0.0) const {
    for (const auto& v : samples_) {
      if (std::abs(v.imag()) > tol) return false;
    }
    return true;
  }

  std::vector<double> real_part() const {
    std::vector<double> out(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) out[i] = samples_[i].real();
    return out;
  }

  cplx mean() const {
    cplx acc = 0.0;
    for (const auto& v : samples_) acc += v;
    return acc / static_cast<double>(samples_.size());
  }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  GridShape shape_;
  std::vector<cplx> samples_;
  double spacing_ = 1.0;
};

inline Signal operator-(const Signal& a, const Signal& b) {
  require_same_shape(a.shape(), b.shape(), "difference");
  Signal out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

inline Signal operator+(const Signal& a, const Signal& b) {
  require_same_shape(a.shape(), b.shape(), "sum");
  Signal out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

inline Signal operator*(double c, const Signal& a) {
  Signal out = a;
  for (auto& v : out.samples()) v *= c;
  return out;
}

inline double distance(const Signal& a, const Signal& b) { return (a - b).norm(); }

// Unnormalized DFT of the samples. With this convention
// sum |X[k]|^2 = N * sum |x[u]|^2 (Parseval).
inline std::vector<cplx> spectrum(const Signal& x) { return fft::forward_copy(x.samples(), x.shape()); }

inline Signal from_spectrum(std::span<const cplx> spec, const GridShape& shape, double spacing) {
  return Signal(shape, fft::inverse_copy(spec, shape), spacing);
}

// Circular convolution computed as IDFT(DFT(x) * h^).
inline Signal convolve(const Signal& x, const FrequencyKernel& h) {
  require_same_shape(x.shape(), h.shape, "convolve");
  auto spec = spectrum(x);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= h.response[i];
  return from_spectrum(spec, x.shape(), x.spacing());
}

// Keeps the samples at stride `factor` along every axis.
inline Signal subsample(const Signal& x, std::size_t factor) {
  GridShape out_shape = x.shape().subsampled(factor);
  Signal out(out_shape, x.spacing() * static_cast<double>(factor));
  if (x.ndims() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i * factor];
  } else {
    const std::size_t cols = out_shape.extent(1);
    for (std::size_t r = 0; r < out_shape.extent(0); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = x.at(r * factor, c * factor);
    }
  }
  return out;
}

// Circular shift: out(u) = x(u - tau). Missing trailing offsets are zero.
inline Signal shift(const Signal& x, std::span<const long> tau) {
  Signal out(x.shape(), x.spacing());
  const long t0 = tau.size() > 0 ? tau[0] : 0;
  if (x.ndims() == 1) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) out[wrap_index(static_cast<long>(i) + t0, n)] = x[i];
    return out;
  }
  const long t1 = tau.size() > 1 ? tau[1] : 0;
  const std::size_t rows = x.shape().extent(0), cols = x.shape().extent(1);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t rr = wrap_index(static_cast<long>(r) + t0, rows);
    for (std::size_t c = 0; c < cols; ++c) out.at(rr, wrap_index(static_cast<long>(c) + t1, cols)) = x.at(r, c);
  }
  return out;
}

inline Signal shift(const Signal& x, std::initializer_list<long> tau) {
  std::vector<long> t(tau);
  return shift(x, std::span<const long>(t));
}

namespace detail {
// Per-axis factors of the band-limited shift by t samples. The Nyquist bin
// gets cos() so real signals stay real.
inline std::vector<cplx> shift_phases(std::size_t n, double t) {
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(signed_bin(i, n)) / static_cast<double>(n);
    out[i] = (n > 1 && i == n / 2) ? cplx(std::cos(w * t), 0.0) : std::polar(1.0, -w * t);
  }
  return out;
}
}  // namespace detail

// Band-limited circular shift by a real offset; equals shift() on integers.
inline Signal shift_fractional(const Signal& x, std::span<const double> tau) {
  auto spec = spectrum(x);
  const std::size_t rows = x.shape().extent(0);
  const auto p0 = detail::shift_phases(rows, tau.size() > 0 ? tau[0] : 0.0);
  if (x.ndims() == 1) {
    for (std::size_t i = 0; i < rows; ++i) spec[i] *= p0[i];
  } else {
    const std::size_t cols = x.shape().extent(1);
    const auto p1 = detail::shift_phases(cols, tau.size() > 1 ? tau[1] : 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) spec[r * cols + c] *= p0[r] * p1[c];
    }
  }
  return from_spectrum(spec, x.shape(), x.spacing());
}

// Periodic linear interpolation back to a grid `factor` times finer.
inline Signal upsample_linear(const Signal& x, std::size_t factor) {
  if (!is_power_of_two(factor)) throw DimensionError("upsampling factor must be a power of two");
  std::vector<std::size_t> ext;
  for (std::size_t e : x.shape().extents()) ext.push_back(e * factor);
  GridShape fine(ext);
  Signal out(fine, x.spacing() / static_cast<double>(factor));
  auto lerp_axis = [factor](std::size_t i, std::size_t n) {
    const std::size_t lo = i / factor;
    const double t = static_cast<double>(i % factor) / static_cast<double>(factor);
    return std::make_tuple(lo, (lo + 1) % n, t);
  };
  if (x.ndims() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto [a, b, t] = lerp_axis(i, x.size());
      out[i] = (1.0 - t) * x[a] + t * x[b];
    }
    return out;
  }
  const std::size_t rows = x.shape().extent(0), cols = x.shape().extent(1);
  for (std::size_t r = 0; r < fine.extent(0); ++r) {
    auto [r0, r1, tr] = lerp_axis(r, rows);
    for (std::size_t c = 0; c < fine.extent(1); ++c) {
      auto [c0, c1, tc] = lerp_axis(c, cols);
      out.at(r, c) = (1.0 - tr) * ((1.0 - tc) * x.at(r0, c0) + tc * x.at(r0, c1)) +
                     tr * ((1.0 - tc) * x.at(r1, c0) + tc * x.at(r1, c1));
    }
  }
  return out;
}

}  // namespace scatterkit
