#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <optional>
#include <vector>

#include "scatterkit/random.hpp"
#include "scatterkit/scattering.hpp"
#include "scatterkit/signal.hpp"

namespace scatterkit {

inline Signal scatter_gradient(const Signal& x, const FilterBank& bank, const ScatterConfig& config,
                               const ScatteringOutput& target) {
  return Scatterer(bank, config).objective_and_gradient(x, target).second;
}

// sigma_J: spatial standard deviation of the target coefficients around their
// per-path means, stride-weighted, summed over paths.
inline double estimate_sigma(const ScatteringOutput& target) {
  double acc = 0.0;
  for (const auto& c : target.coeffs) {
    const cplx m = c.mean();
    double d = 0.0;
    for (const auto& v : c.samples()) d += std::norm(v - m);
    acc += d * c.cell_volume();
  }
  return std::sqrt(acc);
}

struct ReconstructionConfig {
  std::uint64_t seed = 0;
  int max_iter = 2000;
  double initial_step = 1.0;
  double shrink = 0.5;
  double grow = 2.0;      // trial step after an accepted step is grow * last step
  double armijo = 1e-4;
  double min_step = 1e-30;
  std::optional<double> sigma;  // stop threshold; estimate_sigma(target) when unset
};

struct ReconstructionRun {
  Signal iterate;
  std::vector<double> history;  // objective after each accepted step; history[0] is the start
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double step = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Gradient descent on ||Phi(x) - target||^2 from Gaussian white noise whose
// energy matches the target's, with Armijo backtracking.
inline ReconstructionRun reconstruct(const ScatteringOutput& target, const FilterBank& bank,
                                     const ReconstructionConfig& cfg = {}) {
  const Scatterer scatterer(bank, target.config);
  ReconstructionRun run;
  run.seed = cfg.seed;
  run.sigma = cfg.sigma.value_or(estimate_sigma(target));
  const GridShape& shape = target.input_shape;
  if (target.norm_squared() == 0.0) {
    // Phi(x) = 0 only for x = 0.
    run.iterate = Signal(shape);
    run.history = {0.0};
    run.converged = true;
    return run;
  }
  const double noise_std = std::sqrt(target.norm_squared() / static_cast<double>(shape.count()));
  Signal x = white_noise(shape, cfg.seed, noise_std);
  auto [value, grad] = scatterer.objective_and_gradient(x, target);
  run.history.push_back(value);
  double step = cfg.initial_step;
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (std::sqrt(value) <= run.sigma) {
      run.converged = true;
      break;
    }
    double g2 = 0.0;
    for (const auto& v : grad.samples()) g2 += std::norm(v);
    if (g2 == 0.0) break;
    bool accepted = false;
    while (step >= cfg.min_step) {
      Signal trial = x;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= step * grad[i];
      auto [tv, tg] = scatterer.objective_and_gradient(trial, target);
      if (tv <= value - cfg.armijo * step * g2) {
        x = std::move(trial);
        value = tv;
        grad = std::move(tg);
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    run.iterations = it + 1;
    if (!accepted) break;
    run.history.push_back(value);
    run.step = step;
    step *= cfg.grow;
  }
  if (std::sqrt(value) <= run.sigma) run.converged = true;
  run.iterate = std::move(x);
  return run;
}

struct Alignment {
  Signal aligned;
  std::vector<double> shift;  // applied to the candidate, in samples
  bool reflected = false;
  double relative_error = 0.0;
};

inline Signal reflect(const Signal& x) {
  Signal out(x.shape(), x.spacing());
  if (x.ndims() == 1) {
    for (std::size_t i = 0; i < x.size(); ++i) out[wrap_index(-static_cast<long>(i), x.size())] = x[i];
    return out;
  }
  const std::size_t rows = x.shape().extent(0), cols = x.shape().extent(1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.at(wrap_index(-static_cast<long>(r), rows), wrap_index(-static_cast<long>(c), cols)) = x.at(r, c);
    }
  }
  return out;
}

namespace detail {

// Re sum_k cross[k] e^{i w_k . tau}: the cross-correlation at a real offset.
inline double correlation_at(const std::vector<cplx>& cross, const GridShape& shape, std::span<const double> tau) {
  const std::size_t rows = shape.extent(0);
  // conj of the shift phases gives e^{+i w t}
  const auto p0 = scatterkit::detail::shift_phases(rows, tau[0]);
  double acc = 0.0;
  if (shape.ndims() == 1) {
    for (std::size_t i = 0; i < rows; ++i) acc += (cross[i] * std::conj(p0[i])).real();
    return acc;
  }
  const std::size_t cols = shape.extent(1);
  const auto p1 = scatterkit::detail::shift_phases(cols, tau[1]);
  for (std::size_t r = 0; r < rows; ++r) {
    cplx row(0.0, 0.0);
    for (std::size_t c = 0; c < cols; ++c) row += cross[r * cols + c] * std::conj(p1[c]);
    acc += (row * std::conj(p0[r])).real();
  }
  return acc;
}

// Maximizes the correlation over a shrinking lattice around `tau`.
inline std::vector<double> refine_offset(const std::vector<cplx>& cross, const GridShape& shape,
                                         std::vector<double> tau) {
  const std::size_t d = shape.ndims();
  double best = correlation_at(cross, shape, tau);
  for (double h = 0.25; h >= 1.0 / 1024.0; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t a = 0; a < d; ++a) {
        for (double s : {-h, h}) {
          auto t = tau;
          t[a] += s;
          const double v = correlation_at(cross, shape, t);
          if (v > best) {
            best = v;
            tau = std::move(t);
            moved = true;
          }
        }
      }
    }
  }
  return tau;
}

}  // namespace detail

// Best circular translation of `candidate` onto `reference`: integer peak of
// the cross-correlation, then a band-limited sub-sample refinement (the
// full-grid scattering is invariant to fractional shifts too). With
// allow_reflection the point reflection u -> -u, to which the scattering of
// real signals is also invariant, is tried as well.
inline Alignment align_to(const Signal& reference, const Signal& candidate, bool allow_reflection = true) {
  require_same_shape(reference.shape(), candidate.shape(), "alignment");
  Alignment best;
  best.relative_error = std::numeric_limits<double>::infinity();
  const double ref_norm = reference.norm();
  const GridShape& shape = reference.shape();
  for (int pass = 0; pass < (allow_reflection ? 2 : 1); ++pass) {
    const Signal cand = pass == 0 ? candidate : reflect(candidate);
    auto cross = spectrum(reference);
    const auto b = spectrum(cand);
    for (std::size_t i = 0; i < cross.size(); ++i) cross[i] *= std::conj(b[i]);
    auto corr = fft::inverse_copy(cross, shape);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < corr.size(); ++i) {
      if (corr[i].real() > corr[arg].real()) arg = i;
    }
    std::vector<double> tau;
    if (shape.ndims() == 1) {
      tau = {static_cast<double>(signed_bin(arg, shape.extent(0)))};
    } else {
      const std::size_t cols = shape.extent(1);
      tau = {static_cast<double>(signed_bin(arg / cols, shape.extent(0))),
             static_cast<double>(signed_bin(arg % cols, cols))};
    }
    tau = detail::refine_offset(cross, shape, std::move(tau));
    Signal aligned = shift_fractional(cand, tau);
    const double err = distance(aligned, reference) / (ref_norm > 0.0 ? ref_norm : 1.0);
    if (err < best.relative_error) best = {std::move(aligned), tau, pass == 1, err};
  }
  return best;
}

}  // namespace scatterkit
