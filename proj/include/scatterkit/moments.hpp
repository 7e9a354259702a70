#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "scatterkit/errors.hpp"
#include "scatterkit/filterbank.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/random.hpp"
#include "scatterkit/scattering.hpp"
#include "scatterkit/signal.hpp"

namespace scatterkit {

enum class ProcessKind { gaussian_white, autoregressive, phase_randomized, bernoulli_spikes, shifted_image, constant };

inline const char* to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::gaussian_white: return "white";
    case ProcessKind::autoregressive: return "ar1";
    case ProcessKind::phase_randomized: return "phase";
    case ProcessKind::bernoulli_spikes: return "spikes";
    case ProcessKind::shifted_image: return "shifted";
    case ProcessKind::constant: return "constant";
  }
  return "?";
}

// A circularly stationary process on a periodic grid.
//   gaussian_white   i.i.d. N(0, param^2)
//   autoregressive   separable AR(1) with coefficient param, unit variance
//   phase_randomized |FFT(image)| with random phases; DC kept
//   bernoulli_spikes 1 with probability param, else 0
//   shifted_image    image circularly shifted by a uniform random offset
//   constant         param everywhere
struct ProcessModel {
  ProcessKind kind = ProcessKind::gaussian_white;
  GridShape shape;
  double param = 1.0;
  Signal image;

  static ProcessModel white(GridShape shape, double stddev = 1.0) {
    return {ProcessKind::gaussian_white, std::move(shape), stddev, {}};
  }
  static ProcessModel ar1(GridShape shape, double a) {
    if (!(std::abs(a) < 1.0)) throw DomainError("AR(1) coefficient must lie in (-1, 1)");
    return {ProcessKind::autoregressive, std::move(shape), a, {}};
  }
  static ProcessModel phase_randomized(const Signal& image) {
    return {ProcessKind::phase_randomized, image.shape(), 0.0, image};
  }
  static ProcessModel spikes(GridShape shape, double density) {
    if (!(density > 0.0 && density <= 1.0)) throw DomainError("spike density must lie in (0, 1]");
    return {ProcessKind::bernoulli_spikes, std::move(shape), density, {}};
  }
  static ProcessModel shifted(const Signal& image) { return {ProcessKind::shifted_image, image.shape(), 0.0, image}; }
  static ProcessModel constant(GridShape shape, double c) {
    return {ProcessKind::constant, std::move(shape), c, {}};
  }

  std::string describe() const {
    std::string s = to_string(kind);
    if (kind == ProcessKind::phase_randomized || kind == ProcessKind::shifted_image) return s;
    char buf[64];
    std::snprintf(buf, sizeof buf, ":%g", param);
    return s + buf;
  }
};

namespace detail {

inline double axis_frequency(std::size_t i, std::size_t n) {
  return 2.0 * std::numbers::pi * static_cast<double>(signed_bin(i, n)) / static_cast<double>(n);
}

// Same modulus spectrum as `image`, phases taken from the DFT of real white
// noise (Hermitian, so the result is real). The DC bin is copied.
inline Signal randomize_phases(const Signal& image, std::uint64_t seed) {
  auto target = spectrum(image);
  auto noise = spectrum(white_noise(image.shape(), seed));
  for (std::size_t i = 1; i < noise.size(); ++i) {
    const double m = std::abs(noise[i]);
    noise[i] = m > 0.0 ? std::abs(target[i]) * noise[i] / m : cplx(std::abs(target[i]), 0.0);
  }
  noise[0] = target[0];
  Signal out = from_spectrum(noise, image.shape(), image.spacing());
  for (auto& v : out.samples()) v = v.real();
  return out;
}

inline Signal ar1_sample(const GridShape& shape, double a, std::uint64_t seed) {
  auto spec = spectrum(white_noise(shape, seed));
  const double gain = std::sqrt(1.0 - a * a);
  auto h = [&](std::size_t i, std::size_t n) { return gain / (1.0 - a * std::polar(1.0, -axis_frequency(i, n))); };
  if (shape.ndims() == 1) {
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= h(i, shape.extent(0));
  } else {
    const std::size_t cols = shape.extent(1);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= h(i / cols, shape.extent(0)) * h(i % cols, cols);
  }
  Signal out = from_spectrum(spec, shape, 1.0);
  for (auto& v : out.samples()) v = v.real();
  return out;
}

}  // namespace detail

inline Signal sample(const ProcessModel& m, std::uint64_t seed) {
  switch (m.kind) {
    case ProcessKind::gaussian_white:
      return white_noise(m.shape, seed, m.param);
    case ProcessKind::autoregressive:
      return detail::ar1_sample(m.shape, m.param, seed);
    case ProcessKind::phase_randomized:
      return detail::randomize_phases(m.image, seed);
    case ProcessKind::bernoulli_spikes: {
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution coin(m.param);
      Signal out(m.shape);
      for (auto& v : out.samples()) v = coin(rng) ? 1.0 : 0.0;
      return out;
    }
    case ProcessKind::shifted_image: {
      std::mt19937_64 rng(seed);
      std::vector<long> tau;
      for (std::size_t e : m.shape.extents()) {
        tau.push_back(static_cast<long>(std::uniform_int_distribution<std::size_t>(0, e - 1)(rng)));
      }
      return shift(m.image, tau);
    }
    case ProcessKind::constant: {
      Signal out(m.shape);
      for (auto& v : out.samples()) v = m.param;
      return out;
    }
  }
  throw DomainError("unknown process kind");
}

// Per-path statistics over R realizations. `mean[p]` estimates E(Phi_J x)
// for path p; `variance[p]` is the spread of the per-realization spatial
// averages. sigma2 estimates ||Phi_J x - E Phi_J x||^2 per unit area,
// summed over paths, with its standard error.
struct MomentEstimate {
  int J = 0;
  int K = 0;
  std::size_t realizations = 0;
  std::vector<ScatteringPath> paths;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<std::vector<double>> spatial;  // [realization][path] spatial averages
  std::vector<double> deviation;             // [realization] per-unit-area squared deviation
  double sigma2 = 0.0;
  double sigma2_stderr = 0.0;

  double standard_error(std::size_t p) const { return std::sqrt(variance[p] / static_cast<double>(realizations)); }
};

inline double spatial_average(const Signal& c) { return c.mean().real(); }

// Moments from explicit realizations.
inline MomentEstimate estimate_moments(const std::vector<Signal>& realizations, const FilterBank& bank,
                                       const ScatterConfig& config) {
  const std::size_t R = realizations.size();
  if (R < 2) throw DomainError("moment estimation needs at least two realizations");
  const Scatterer scatterer(bank, config);
  std::vector<ScatteringOutput> outs(R);
  parallel_for(R, [&](std::size_t r) { outs[r] = scatterer(realizations[r]); });

  MomentEstimate est;
  est.J = bank.J;
  est.K = bank.K;
  est.realizations = R;
  est.paths = outs.front().paths;
  const std::size_t P = est.paths.size();
  est.spatial.assign(R, std::vector<double>(P, 0.0));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t p = 0; p < P; ++p) est.spatial[r][p] = spatial_average(outs[r].coeffs[p]);
  }
  est.mean.assign(P, 0.0);
  est.variance.assign(P, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    double s = 0.0;
    for (std::size_t r = 0; r < R; ++r) s += est.spatial[r][p];
    est.mean[p] = s / static_cast<double>(R);
    double v = 0.0;
    for (std::size_t r = 0; r < R; ++r) v += (est.spatial[r][p] - est.mean[p]) * (est.spatial[r][p] - est.mean[p]);
    est.variance[p] = v / static_cast<double>(R - 1);
  }
  double area = 1.0;
  for (std::size_t e : bank.shape.extents()) area *= static_cast<double>(e);
  est.deviation.assign(R, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    double d = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const Signal& c = outs[r].coeffs[p];
      double acc = 0.0;
      for (const auto& v : c.samples()) acc += (v.real() - est.mean[p]) * (v.real() - est.mean[p]);
      d += acc * c.cell_volume();
    }
    est.deviation[r] = d / area;
  }
  double s = 0.0;
  for (double d : est.deviation) s += d;
  est.sigma2 = s / static_cast<double>(R);
  double v = 0.0;
  for (double d : est.deviation) v += (d - est.sigma2) * (d - est.sigma2);
  est.sigma2_stderr = std::sqrt(v / static_cast<double>(R - 1) / static_cast<double>(R));
  return est;
}

inline std::vector<Signal> draw(const ProcessModel& model, std::size_t R, std::uint64_t seed) {
  std::vector<Signal> xs(R);
  parallel_for(R, [&](std::size_t r) { xs[r] = sample(model, mix_seed(seed, r)); });
  return xs;
}

inline MomentEstimate estimate_moments(const ProcessModel& model, const FilterBank& bank, const ScatterConfig& config,
                                       std::size_t R, std::uint64_t seed) {
  return estimate_moments(draw(model, R, seed), bank, config);
}

struct DecayPoint {
  int J = 0;
  double sigma2 = 0.0;
  double sigma2_stderr = 0.0;
};

// sigma_J^2 for each J, from the same realizations.
inline std::vector<DecayPoint> variance_decay(const ProcessModel& model, int K, const ScatterConfig& config,
                                              const std::vector<int>& J_list, std::size_t R, std::uint64_t seed) {
  for (std::size_t i = 1; i < J_list.size(); ++i) {
    if (J_list[i] <= J_list[i - 1]) throw ScaleError("J list must be increasing");
  }
  const auto xs = draw(model, R, seed);
  std::vector<DecayPoint> out;
  for (int J : J_list) {
    const FilterBank bank = build_bank(model.shape, J, K);
    const auto est = estimate_moments(xs, bank, config);
    out.push_back({J, est.sigma2, est.sigma2_stderr});
  }
  return out;
}

// Relative distance between the texture's order-m moments and those of its
// phase-randomized Gaussian surrogate, with the standard error of that
// distance (one realization against an R-sample mean).
struct ContrastReport {
  std::vector<double> distance;  // index m = 1, 2 (index 0 unused)
  std::vector<double> noise;      // standard error of each distance
  std::vector<double> texture_moments;
  MomentEstimate surrogate;
};

inline ContrastReport gaussian_contrast(const Signal& texture, const FilterBank& bank, const ScatterConfig& config,
                                        std::size_t R, std::uint64_t seed) {
  ContrastReport rep;
  rep.surrogate = estimate_moments(ProcessModel::phase_randomized(texture), bank, config, R, seed);
  const auto s = Scatterer(bank, config)(texture);
  const std::size_t P = s.paths.size();
  rep.texture_moments.resize(P);
  for (std::size_t p = 0; p < P; ++p) rep.texture_moments[p] = spatial_average(s.coeffs[p]);
  const std::size_t orders = static_cast<std::size_t>(config.max_order) + 1;
  std::vector<double> diff(orders, 0.0), ref(orders, 0.0), var(orders, 0.0);
  const double inflate = 1.0 + 1.0 / static_cast<double>(R);
  for (std::size_t p = 0; p < P; ++p) {
    const std::size_t m = s.paths[p].order();
    const double d = rep.texture_moments[p] - rep.surrogate.mean[p];
    diff[m] += d * d;
    ref[m] += rep.texture_moments[p] * rep.texture_moments[p];
    var[m] += rep.surrogate.variance[p] * inflate;
  }
  rep.distance.assign(orders, 0.0);
  rep.noise.assign(orders, 0.0);
  for (std::size_t m = 1; m < orders; ++m) {
    if (ref[m] == 0.0) continue;
    rep.distance[m] = std::sqrt(diff[m] / ref[m]);
    rep.noise[m] = std::sqrt(var[m] / ref[m]);
  }
  return rep;
}

}  // namespace scatterkit
