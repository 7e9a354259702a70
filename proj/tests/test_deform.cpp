#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "scatterkit/deform.hpp"
#include "scatterkit/io.hpp"

using namespace scatterkit;

namespace {

const GridShape kGrid({64, 64});

Signal bump() {
  Signal s(kGrid);
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t c = 0; c < 64; ++c) {
      const double dr = r - 32.0, dc = c - 30.0;
      s.at(r, c) = std::exp(-(dr * dr + dc * dc) / 32.0);
    }
  }
  return s;
}

// Sinusoidal field with one cycle along rows, rescaled to the given Jacobian norm.
WarpField sin_field(double jac) {
  const double amp = jac * 32.0 / (2.0 * std::numbers::pi);
  const std::vector<double> a{amp, 0.5 * amp}, cycles{1.0, 0.0}, phase{0.0, 1.0};
  const auto g = sinusoidal_field(kGrid, a, cycles, phase);
  return g.scaled(jac / g.jac_norm());
}

}  // namespace

TEST(WarpField, NormsMatchRecomputation) {
  const auto g = random_smooth_field(kGrid, 4.0, 0.3, 5);
  double sup = 0.0, jac = 0.0;
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t c = 0; c < 64; ++c) {
      const std::size_t i = r * 64 + c;
      sup = std::max(sup, std::hypot(g.component(0)[i], g.component(1)[i]));
      Eigen::Matrix2d m;
      for (std::size_t a = 0; a < 2; ++a) {
        m(static_cast<Eigen::Index>(a), 0) =
            0.5 * (g.component(a)[((r + 1) % 64) * 64 + c] - g.component(a)[((r + 63) % 64) * 64 + c]);
        m(static_cast<Eigen::Index>(a), 1) =
            0.5 * (g.component(a)[r * 64 + (c + 1) % 64] - g.component(a)[r * 64 + (c + 63) % 64]);
      }
      jac = std::max(jac, Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues()[0]);
    }
  }
  EXPECT_NEAR(g.sup_norm(), sup, 1e-9);
  EXPECT_NEAR(g.jac_norm(), jac, 1e-9);
  EXPECT_NEAR(g.jac_norm(), 0.3, 1e-12);
}

TEST(Warp, ZeroFieldIsIdentity) {
  const Signal x = oracle::random_signal(kGrid, 1);
  EXPECT_EQ(warp(x, WarpField::zero(kGrid)), x);
  const Signal y = oracle::random_signal(GridShape({128}), 2);
  EXPECT_EQ(warp(y, WarpField::zero(GridShape({128}))), y);
}

TEST(Warp, IntegerTranslationIsShift) {
  const Signal x = oracle::random_signal(kGrid, 3);
  const Signal y = warp(x, translation_field(kGrid, {3.0, -5.0}));
  EXPECT_LT(distance(y, shift(x, {3, -5})), 1e-9);
  const Signal z = oracle::random_signal(GridShape({64}), 4);
  EXPECT_LT(distance(warp(z, translation_field(GridShape({64}), {7.0})), shift(z, {7})), 1e-9);
}

TEST(Warp, RejectsNonDiffeomorphism) {
  const Signal x = oracle::random_signal(kGrid, 5);
  EXPECT_THROW(warp(x, sin_field(0.5).scaled(2.2)), DiffeomorphismError);
  EXPECT_THROW(warp(x, sin_field(0.5).scaled(2.5)), DiffeomorphismError);
}

TEST(Warp, SinFieldVolumeDistortion) {
  const Signal x = bump();
  const auto g = sin_field(0.1);
  EXPECT_NEAR(g.jac_norm(), 0.1, 1e-12);
  const double ratio = warp(x, g).norm() / x.norm();
  EXPECT_NEAR(ratio, 0.9567082, 1e-6);
  EXPECT_LT(std::abs(ratio - 1.0), 0.15);
}

TEST(Warp, NegatedFieldInvertsToSecondOrder) {
  const Signal x = bump();
  for (double jac : {0.02, 0.05, 0.1, 0.2}) {
    const auto g = sin_field(jac);
    const Signal back = warp(warp(x, g), g.scaled(-1.0));
    EXPECT_LE(distance(back, x) / x.norm(), 10.0 * jac * jac) << "jac=" << jac;
  }
}

TEST(DiffMetric, Examples) {
  EXPECT_EQ(diff_metric(WarpField::zero(kGrid), 3), 0.0);
  const auto t = translation_field(kGrid, {3.0, 4.0});
  EXPECT_EQ(t.jac_norm(), 0.0);
  EXPECT_DOUBLE_EQ(diff_metric(t, 2), 5.0 / 4.0);
  EXPECT_NEAR(diff_metric(sin_field(0.1), 4), 0.16376436, 1e-8);
}

TEST(DiffMetric, DecreasingInScaleAndLinearInAmplitude) {
  const auto g = random_smooth_field(kGrid, 6.0, 0.05, 9);
  for (int J = 0; J < 6; ++J) EXPECT_LT(diff_metric(g, J + 1), diff_metric(g, J));
  for (double c : {0.5, 2.0, 7.0, 19.0}) {
    EXPECT_NEAR(diff_metric(g.scaled(c), 3), c * diff_metric(g, 3), 1e-12 * c);
  }
}

TEST(Stability, ZeroWarpIsUndefined) {
  const Signal x = oracle::random_signal(kGrid, 6);
  EXPECT_THROW(stability_ratio(identity_representation, x, WarpField::zero(kGrid), 3), UndefinedRatioError);
  EXPECT_THROW(stability_ratio(identity_representation, Signal(kGrid), sin_field(0.1), 3), UndefinedRatioError);
}

TEST(Stability, IdentityRatioDoublesWithScale) {
  const Signal x = io::read_pgm(std::string(SCATTERKIT_DATA_DIR) + "/brick_64.pgm");
  const auto t = translation_field(kGrid, {1.0, 0.0});
  for (int J = 1; J < 6; ++J) {
    const double a = stability_ratio(identity_representation, x, t, J);
    const double b = stability_ratio(identity_representation, x, t, J + 1);
    EXPECT_NEAR(b / a, 2.0, 1e-12);
  }
}

// Brick texture, 20 warps with ||grad g|| from 0.02 to 0.2 at J=3, K=4.
TEST(Stability, ScatteringBoundedAndBelowFourierModulus) {
  const Signal x = io::read_pgm(std::string(SCATTERKIT_DATA_DIR) + "/brick_64.pgm");
  const auto bank = build_bank(kGrid, 3, 4);
  const auto sweep = warp_sweep(kGrid, 20, 0.02, 0.2, 3);
  const auto rep = scattering_representation(bank, {2, 1, Rho::modulus});
  double smax = 0.0, smin = 1e300, fmax = 0.0;
  for (const auto& g : sweep) {
    const double r = stability_ratio(rep, x, g, 3);
    smax = std::max(smax, r);
    smin = std::min(smin, r);
    fmax = std::max(fmax, stability_ratio(fourier_modulus_representation, x, g, 3));
  }
  EXPECT_NEAR(smax, 0.0636, 0.002);
  EXPECT_LT(smax / smin, 10.0);
  EXPECT_LT(smax, fmax);
}

TEST(Stability, ConstantGrowsAtMostLinearlyInOrder) {
  const Signal x = io::read_pgm(std::string(SCATTERKIT_DATA_DIR) + "/brick_64.pgm");
  const auto bank = build_bank(kGrid, 3, 4);
  const auto sweep = warp_sweep(kGrid, 20, 0.02, 0.2, 3);
  std::vector<double> per_order;
  for (int M = 1; M <= 3; ++M) {
    const auto rep = scattering_representation(bank, {M, 1, Rho::modulus});
    double mean = 0.0;
    for (const auto& g : sweep) mean += stability_ratio(rep, x, g, 3) / 20.0;
    per_order.push_back(mean / M);
  }
  for (std::size_t m = 0; m + 1 < per_order.size(); ++m) EXPECT_LE(per_order[m + 1], 1.2 * per_order[m]);
}

TEST(Representations, NormsMatchSignal) {
  const Signal x = oracle::random_signal(kGrid, 7);
  const auto id = identity_representation(x);
  const auto fm = fourier_modulus_representation(x);
  const std::vector<double> zero(id.size(), 0.0), zf(fm.size(), 0.0);
  EXPECT_NEAR(euclidean_distance(id, zero), x.norm(), 1e-9 * x.norm());
  EXPECT_NEAR(euclidean_distance(fm, zf), x.norm(), 1e-9 * x.norm());
}

TEST(WarpSweep, DeterministicAndSpread) {
  const auto a = warp_sweep(kGrid, 10, 0.02, 0.2, 4);
  const auto b = warp_sweep(kGrid, 10, 0.02, 0.2, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].component(0), b[i].component(0));
    EXPECT_NEAR(a[i].jac_norm(), 0.02 + 0.02 * static_cast<double>(i), 1e-12);
  }
}
