#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <numbers>
#include <string>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/fft.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/random.hpp"
#include "scatterkit/scattering.hpp"
#include "scatterkit/signal.hpp"

namespace scatterkit {

// Displacement field g(u), one component per axis in samples. The norms are
// recomputed whenever the field is built.
class WarpField {
 public:
  WarpField() = default;

  WarpField(GridShape shape, std::vector<std::vector<double>> components)
      : shape_(std::move(shape)), comp_(std::move(components)) {
    if (comp_.size() != shape_.ndims()) throw DimensionError("warp field needs one component per axis");
    for (const auto& c : comp_) {
      if (c.size() != shape_.count()) throw DimensionError("warp component does not match grid " + shape_.str());
    }
    measure();
  }

  static WarpField zero(const GridShape& shape) {
    return WarpField(shape, std::vector<std::vector<double>>(shape.ndims(), std::vector<double>(shape.count(), 0.0)));
  }

  const GridShape& shape() const { return shape_; }
  const std::vector<double>& component(std::size_t axis) const { return comp_[axis]; }
  double sup_norm() const { return sup_; }
  double jac_norm() const { return jac_; }

  WarpField scaled(double c) const {
    auto comp = comp_;
    for (auto& a : comp) {
      for (auto& v : a) v *= c;
    }
    return WarpField(shape_, std::move(comp));
  }

  // 2x2 (or 1x1) finite-difference Jacobian of g at flat index i.
  std::array<double, 4> jacobian(std::size_t i) const {
    std::array<double, 4> J{0, 0, 0, 0};
    const std::size_t nd = shape_.ndims();
    if (nd == 1) {
      const std::size_t n = shape_.extent(0);
      J[0] = 0.5 * (comp_[0][(i + 1) % n] - comp_[0][(i + n - 1) % n]);
      return J;
    }
    const std::size_t rows = shape_.extent(0), cols = shape_.extent(1);
    const std::size_t r = i / cols, c = i % cols;
    const std::size_t up = ((r + rows - 1) % rows) * cols + c, down = ((r + 1) % rows) * cols + c;
    const std::size_t left = r * cols + (c + cols - 1) % cols, right = r * cols + (c + 1) % cols;
    for (std::size_t a = 0; a < 2; ++a) {
      J[a * 2 + 0] = 0.5 * (comp_[a][down] - comp_[a][up]);
      J[a * 2 + 1] = 0.5 * (comp_[a][right] - comp_[a][left]);
    }
    return J;
  }

 private:
  // Largest singular value of [[a, b], [c, d]].
  static double spectral_norm(const std::array<double, 4>& m) {
    const double s = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det * det));
    return std::sqrt(0.5 * (s + disc));
  }

  void measure() {
    sup_ = 0.0;
    jac_ = 0.0;
    for (std::size_t i = 0; i < shape_.count(); ++i) {
      double m2 = 0.0;
      for (const auto& c : comp_) m2 += c[i] * c[i];
      sup_ = std::max(sup_, std::sqrt(m2));
      const auto J = jacobian(i);
      jac_ = std::max(jac_, shape_.ndims() == 1 ? std::abs(J[0]) : spectral_norm(J));
    }
  }

  GridShape shape_;
  std::vector<std::vector<double>> comp_;
  double sup_ = 0.0;
  double jac_ = 0.0;
};

namespace detail {

// Keys cubic convolution weights, a = -0.5, for offsets t-1, t, t+1, t+2.
inline std::array<double, 4> keys_weights(double t) {
  auto w = [](double s) {
    s = std::abs(s);
    if (s <= 1.0) return (1.5 * s - 2.5) * s * s + 1.0;
    if (s < 2.0) return ((-0.5 * s + 2.5) * s - 4.0) * s + 2.0;
    return 0.0;
  };
  return {w(t + 1.0), w(t), w(1.0 - t), w(2.0 - t)};
}

}  // namespace detail

// g.x(u) = x(u - g(u)) with periodic cubic interpolation.
inline Signal warp(const Signal& x, const WarpField& g) {
  require_same_shape(x.shape(), g.shape(), "warp");
  if (!(g.jac_norm() < 1.0)) {
    throw DiffeomorphismError("warp with |grad g| = " + std::to_string(g.jac_norm()) + " is not a diffeomorphism");
  }
  Signal out(x.shape(), x.spacing());
  if (x.ndims() == 1) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double p = static_cast<double>(i) - g.component(0)[i];
      const double f = std::floor(p);
      const auto w = detail::keys_weights(p - f);
      cplx acc = 0.0;
      for (int a = 0; a < 4; ++a) acc += w[a] * x[wrap_index(static_cast<long>(f) - 1 + a, n)];
      out[i] = acc;
    }
    return out;
  }
  const std::size_t rows = x.shape().extent(0), cols = x.shape().extent(1);
  parallel_for(rows, [&](std::size_t r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      const double pr = static_cast<double>(r) - g.component(0)[i];
      const double pc = static_cast<double>(c) - g.component(1)[i];
      const double fr = std::floor(pr), fc = std::floor(pc);
      const auto wr = detail::keys_weights(pr - fr);
      const auto wc = detail::keys_weights(pc - fc);
      cplx acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        const std::size_t rr = wrap_index(static_cast<long>(fr) - 1 + a, rows);
        cplx row = 0.0;
        for (int b = 0; b < 4; ++b) row += wc[b] * x.at(rr, wrap_index(static_cast<long>(fc) - 1 + b, cols));
        acc += wr[a] * row;
      }
      out[i] = acc;
    }
  });
  return out;
}

// |g|_Diff = 2^-J ||g||_inf + ||grad g||_inf.
inline double diff_metric(const WarpField& g, int J) { return std::ldexp(g.sup_norm(), -J) + g.jac_norm(); }

// ---- fields ------------------------------------------------------------------

inline WarpField translation_field(const GridShape& shape, std::span<const double> tau) {
  std::vector<std::vector<double>> comp;
  for (std::size_t a = 0; a < shape.ndims(); ++a) comp.emplace_back(shape.count(), a < tau.size() ? tau[a] : 0.0);
  return WarpField(shape, std::move(comp));
}

inline WarpField translation_field(const GridShape& shape, std::initializer_list<double> tau) {
  std::vector<double> t(tau);
  return translation_field(shape, std::span<const double>(t));
}

// g_a(u) = amplitude[a] sin(2 pi cycles . u / N + phase[a]).
inline WarpField sinusoidal_field(const GridShape& shape, std::span<const double> amplitude,
                                  std::span<const double> cycles, std::span<const double> phase = {}) {
  const std::size_t nd = shape.ndims();
  std::vector<std::vector<double>> comp(nd, std::vector<double>(shape.count()));
  const std::size_t cols = nd == 2 ? shape.extent(1) : 1;
  for (std::size_t i = 0; i < shape.count(); ++i) {
    const std::array<double, 2> u{static_cast<double>(nd == 2 ? i / cols : i), static_cast<double>(i % cols)};
    double arg = 0.0;
    for (std::size_t b = 0; b < nd; ++b) arg += 2.0 * std::numbers::pi * cycles[b] * u[b] / shape.extent(b);
    for (std::size_t a = 0; a < nd; ++a) comp[a][i] = amplitude[a] * std::sin(arg + (a < phase.size() ? phase[a] : 0.0));
  }
  return WarpField(shape, std::move(comp));
}

// Gaussian random field with correlation length `scale` samples, rescaled so
// that ||grad g||_inf equals `jac`.
inline WarpField random_smooth_field(const GridShape& shape, double scale, double jac, std::uint64_t seed) {
  std::vector<std::vector<double>> comp;
  for (std::size_t a = 0; a < shape.ndims(); ++a) {
    Signal n = white_noise(shape, mix_seed(seed, a), 1.0);
    auto spec = spectrum(n);
    std::size_t rest_cols = shape.ndims() == 2 ? shape.extent(1) : 1;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double w2 = 0.0;
      const std::size_t idx[2] = {shape.ndims() == 2 ? i / rest_cols : i, i % rest_cols};
      for (std::size_t b = 0; b < shape.ndims(); ++b) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(signed_bin(idx[b], shape.extent(b))) /
                         static_cast<double>(shape.extent(b));
        w2 += w * w;
      }
      spec[i] *= std::exp(-0.5 * w2 * scale * scale);
    }
    spec[0] = 0.0;
    const Signal smooth = from_spectrum(spec, shape, 1.0);
    comp.push_back(smooth.real_part());
  }
  WarpField g(shape, std::move(comp));
  if (g.jac_norm() == 0.0) return g;
  return g.scaled(jac / g.jac_norm());
}

// `count` random smooth fields with ||grad g||_inf spread linearly over
// [jac_min, jac_max] and correlation lengths spread geometrically from
// coarse to fine.
inline std::vector<WarpField> warp_sweep(const GridShape& shape, std::size_t count, double jac_min, double jac_max,
                                         std::uint64_t seed) {
  std::vector<WarpField> out(count);
  const double coarse = static_cast<double>(shape.min_extent()) / 8.0;
  const double fine = 1.5;
  parallel_for(count, [&](std::size_t i) {
    const double t = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    const double jac = jac_min + t * (jac_max - jac_min);
    const double scale = coarse * std::pow(fine / coarse, static_cast<double>(i % 5) / 4.0);
    out[i] = random_smooth_field(shape, scale, jac, mix_seed(seed, i));
  });
  return out;
}

// ---- representations and the stability harness ------------------------------

// A representation maps a signal to a vector compared in Euclidean distance.
using Representation = std::function<std::vector<double>(const Signal&)>;

// Samples weighted by sqrt(cell volume): distances equal signal norms.
inline std::vector<double> identity_representation(const Signal& x) {
  const double w = std::sqrt(x.cell_volume());
  std::vector<double> out;
  out.reserve(2 * x.size());
  for (const auto& v : x.samples()) {
    out.push_back(w * v.real());
    out.push_back(w * v.imag());
  }
  return out;
}

// |X(w)| scaled so that its norm equals ||x||.
inline std::vector<double> fourier_modulus_representation(const Signal& x) {
  const auto spec = spectrum(x);
  const double w = std::sqrt(x.cell_volume() / static_cast<double>(x.size()));
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) out[i] = w * std::abs(spec[i]);
  return out;
}

// Holds its own copy of the bank, so the argument may be a temporary.
inline Representation scattering_representation(const FilterBank& bank, ScatterConfig config) {
  auto owned = std::make_shared<const FilterBank>(bank);
  auto s = std::make_shared<const Scatterer>(*owned, config);
  return [owned, s](const Signal& x) { return weighted_features((*s)(x)); };
}

inline double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("representations have different lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

struct StabilityMeasurement {
  double sup_norm = 0.0;
  double jac_norm = 0.0;
  double metric = 0.0;
  double distance = 0.0;
  double ratio = 0.0;
};

// ||rep(g.x) - rep(x)|| / (|g|_Diff ||x||).
inline StabilityMeasurement measure_stability(const Representation& rep, const Signal& x, const WarpField& g, int J) {
  StabilityMeasurement m;
  m.sup_norm = g.sup_norm();
  m.jac_norm = g.jac_norm();
  m.metric = diff_metric(g, J);
  const double xn = x.norm();
  if (m.metric == 0.0 || xn == 0.0) throw UndefinedRatioError("stability ratio undefined for a zero warp or signal");
  m.distance = euclidean_distance(rep(warp(x, g)), rep(x));
  m.ratio = m.distance / (m.metric * xn);
  return m;
}

inline double stability_ratio(const Representation& rep, const Signal& x, const WarpField& g, int J) {
  return measure_stability(rep, x, g, J).ratio;
}

}  // namespace scatterkit
